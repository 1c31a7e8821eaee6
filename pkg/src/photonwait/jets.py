"""Truncated bivariate Taylor ("jet") arithmetic.

A Jet stores normalized Taylor coefficients c[i, j] = (1/(i! j!))
d^{i+j}F / ds^i dT^j of a function F around an expansion point, truncated
at s-order ns and T-order nt (nt = 2 everywhere in this package: the
wait-time formulas need at most two T-derivatives).  Arithmetic is the
Cauchy product truncated at the same orders, which makes every extracted
derivative exact up to round-off: no finite-difference step-size error.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Jet",
    "const",
    "var_s",
    "var_t",
    "analytic",
    "jet_exp",
    "jet_log",
    "jet_sqrt",
    "jet_inv",
    "cs_taylor",
    "entire_cosh_jet",
    "entire_sinhc_jet",
]


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs: np.ndarray):
        self.c = np.asarray(coeffs, dtype=float)
        if self.c.ndim != 2:
            raise ValueError("jet coefficients must be 2-d (s-order, T-order)")

    @property
    def ns(self) -> int:
        return self.c.shape[0] - 1

    @property
    def nt(self) -> int:
        return self.c.shape[1] - 1

    @property
    def value(self) -> float:
        return float(self.c[0, 0])

    def coeff(self, i: int, j: int = 0) -> float:
        """Normalized Taylor coefficient, i.e. the derivative over i!*j!."""
        return float(self.c[i, j])

    def deriv_s(self, i: int, j: int = 0) -> float:
        """Raw mixed derivative d^{i+j}F/ds^i dT^j."""
        return float(self.c[i, j]) * math.factorial(i) * math.factorial(j)

    # -- arithmetic -------------------------------------------------------

    def _like(self, coeffs: np.ndarray) -> "Jet":
        return Jet(coeffs)

    def __add__(self, other):
        if isinstance(other, Jet):
            return self._like(self.c + other.c)
        out = self.c.copy()
        out[0, 0] += float(other)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -float(other))

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._like(self.c * float(other))
        ns, nt = self.ns, self.nt
        out = np.zeros_like(self.c)
        a, b = self.c, other.c
        for j1 in range(nt + 1):
            for j2 in range(nt + 1 - j1):
                out[:, j1 + j2] += np.convolve(a[:, j1], b[:, j2])[: ns + 1]
        return self._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * jet_inv(other)
        return self._like(self.c / float(other))

    def __rtruediv__(self, other):
        return float(other) * jet_inv(self)

    def __repr__(self):
        return f"Jet(ns={self.ns}, nt={self.nt}, value={self.value:.6g})"


def const(value: float, ns: int, nt: int = 2) -> Jet:
    c = np.zeros((ns + 1, nt + 1))
    c[0, 0] = value
    return Jet(c)


def var_s(s0: float, ns: int, nt: int = 2) -> Jet:
    """The jet of s itself around s0."""
    c = np.zeros((ns + 1, nt + 1))
    c[0, 0] = s0
    if ns >= 1:
        c[1, 0] = 1.0
    return Jet(c)


def var_t(t0: float, ns: int, nt: int = 2) -> Jet:
    """The jet of T itself around t0."""
    c = np.zeros((ns + 1, nt + 1))
    c[0, 0] = t0
    if nt >= 1:
        c[0, 1] = 1.0
    return Jet(c)


def analytic(jet: Jet, taylor: np.ndarray) -> Jet:
    """Compose f(jet) given Taylor coefficients of f at jet.value.

    ``taylor[k]`` must be f^{(k)}(jet.value)/k!.  Evaluated by Horner on
    the zero-constant part, which is nilpotent at the truncation orders.
    """
    p = Jet(jet.c.copy())
    p.c[0, 0] = 0.0
    need = jet.ns + jet.nt + 1
    taylor = np.asarray(taylor, dtype=float)
    if taylor.size < need:
        raise ValueError(f"need {need} Taylor coefficients, got {taylor.size}")
    acc = const(taylor[need - 1], jet.ns, jet.nt)
    for k in range(need - 2, -1, -1):
        acc = acc * p + taylor[k]
    return acc


def _order(jet: Jet) -> int:
    return jet.ns + jet.nt + 1


def jet_exp(jet: Jet) -> Jet:
    e0 = math.exp(jet.value)
    n = _order(jet)
    taylor = np.empty(n)
    taylor[0] = e0
    for k in range(1, n):
        taylor[k] = taylor[k - 1] / k
    return analytic(jet, taylor)


def jet_log(jet: Jet) -> Jet:
    x0 = jet.value
    if x0 <= 0:
        raise ValueError("jet_log requires a positive constant term")
    n = _order(jet)
    taylor = np.empty(n)
    taylor[0] = math.log(x0)
    for k in range(1, n):
        taylor[k] = ((-1.0) ** (k + 1)) / (k * x0**k)
    return analytic(jet, taylor)


def jet_sqrt(jet: Jet) -> Jet:
    x0 = jet.value
    if x0 <= 0:
        raise ValueError("jet_sqrt requires a positive constant term")
    n = _order(jet)
    taylor = np.empty(n)
    taylor[0] = math.sqrt(x0)
    coef = 1.0  # (1/2 choose k)
    for k in range(1, n):
        coef *= (0.5 - (k - 1)) / k
        taylor[k] = coef * taylor[0] / x0**k
    return analytic(jet, taylor)


def jet_inv(jet: Jet) -> Jet:
    x0 = jet.value
    if x0 == 0:
        raise ValueError("jet_inv requires a nonzero constant term")
    n = _order(jet)
    taylor = np.array([((-1.0) ** k) / x0 ** (k + 1) for k in range(n)])
    return analytic(jet, taylor)


# -- entire hyperbolic functions of a jet ---------------------------------
#
# C(x) = cosh(sqrt x) and S(x) = sinh(sqrt x)/sqrt x as entire functions
# of x.  For the generating functions the argument is x = z^2 T^2 whose
# constant term is nonnegative for every source below threshold, and the
# bracket they build grows like e^{sqrt x}, so the Taylor arrays are
# returned scaled by e^{-logscale} to keep the subsequent log-space
# composition finite.

_RECURRENCE_MARGIN = 4  # use closed-form recurrence once sqrt(x0) > 4*K


def cs_taylor(x0: float, nmax: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Taylor coefficients of C and S at x0, scaled by exp(-logscale).

    Returns (c, s, logscale) with C^{(k)}(x0)/k! = c[k] * exp(logscale).
    """
    if x0 >= 0:
        u0 = math.sqrt(x0)
        if u0 <= max(30.0, _RECURRENCE_MARGIN * nmax):
            c, s = _cs_series(x0, nmax)
            return c, s, 0.0
        return _cs_recurrence(x0, nmax, scaled=True)
    if x0 >= -100.0:
        c, s = _cs_series(x0, nmax)
        return c, s, 0.0
    return _cs_recurrence(x0, nmax, scaled=False)


def _cs_series(x0: float, nmax: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.zeros(nmax)
    s = np.zeros(nmax)
    # term0_c(k) = 1/(2k)!, term0_s(k) = 1/(2k+1)!
    t0c, t0s = 1.0, 1.0
    for k in range(nmax):
        tc, ts = t0c, t0s
        accc, accs = tc, ts
        m = 0
        while m < 2000:
            ratio = (m + k + 1) / (m + 1) * x0
            tc = tc * ratio / ((2 * m + 2 * k + 1) * (2 * m + 2 * k + 2))
            ts = ts * ratio / ((2 * m + 2 * k + 2) * (2 * m + 2 * k + 3))
            accc += tc
            accs += ts
            if abs(tc) <= 1e-18 * abs(accc) and abs(ts) <= 1e-18 * abs(accs):
                break
            m += 1
        c[k], s[k] = accc, accs
        t0c /= (2 * k + 1) * (2 * k + 2)
        t0s /= (2 * k + 2) * (2 * k + 3)
    return c, s


def _cs_recurrence(
    x0: float, nmax: int, scaled: bool
) -> tuple[np.ndarray, np.ndarray, float]:
    c = np.zeros(nmax)
    s = np.zeros(nmax)
    if x0 >= 0:
        u0 = math.sqrt(x0)
        if scaled:
            # values of C, S times e^{-u0}
            c[0] = 0.5 * (1.0 + math.exp(-2.0 * u0))
            s[0] = (1.0 - math.exp(-2.0 * u0)) / (2.0 * u0)
            logscale = u0
        else:  # pragma: no cover - unscaled positive branch unused
            c[0] = math.cosh(u0)
            s[0] = math.sinh(u0) / u0
            logscale = 0.0
    else:
        r = math.sqrt(-x0)
        c[0] = math.cos(r)
        s[0] = math.sin(r) / r
        logscale = 0.0
    for k in range(nmax - 1):
        c[k + 1] = s[k] / (2.0 * (k + 1))
        s[k + 1] = (c[k] - (2 * k + 1) * s[k]) / (2.0 * x0 * (k + 1))
    return c, s, logscale


def entire_cosh_jet(jet: Jet) -> Jet:
    c, _, ls = cs_taylor(jet.value, _order(jet))
    if ls != 0.0:
        raise OverflowError("entire_cosh_jet argument too large for direct use")
    return analytic(jet, c)


def entire_sinhc_jet(jet: Jet) -> Jet:
    _, s, ls = cs_taylor(jet.value, _order(jet))
    if ls != 0.0:
        raise OverflowError("entire_sinhc_jet argument too large for direct use")
    return analytic(jet, s)
