"""Analytic distributions, moments and most-probable-time formulas.

Thermal and DPO regimes are small- and large-occupation expansions; the
resonance-fluorescence (RF) family is exact: inter-detection statistics of
the driven two-level atom are Markovian, so every wait-time density is an
inverse Laplace transform of a rational function and can be written as a
finite sum of exponential-polynomial terms.

Two numerical regimes are used for RF.  Away from Omega = beta the three
poles of the rational transform are well separated and a direct residue
evaluation (complex arithmetic, real part taken at the end) is stable.
Near Omega = beta the poles nearly merge and the residues cancel
catastrophically; there the n <= 3 densities are evaluated through entire
bracket functions B_n(x) (power series in x = (beta^2 - Omega^2) T^2)
which are uniformly stable straight across the degenerate point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .jets import cs_taylor
from .model import (
    Detector,
    DistKind,
    Dpo,
    MomentSummary,
    Rf,
    SourceParams,
    Thermal,
    entire_cosh,
    entire_sinhc,
    mean_flux,
)

__all__ = [
    "coherent_wait",
    "thermal_approx",
    "dpo_approx",
    "rf_wn",
    "rf_pn",
    "rf_wn_shorttime",
    "rf_wn_strongfield",
    "rf_wn_jform",
    "rf_moments",
    "most_probable_wait",
    "RfAux",
    "evaluate",
    "UnsupportedRegimeError",
]


class UnsupportedRegimeError(ValueError):
    """The requested (regime, n, eta) combination has no closed form."""


# -------------------------------------------------------------------------
# coherent light
# -------------------------------------------------------------------------


def coherent_wait(n: int, T, flux: float, eta: float = 1.0):
    """Gamma density with shape n and rate eta*flux; w_n and P_n coincide."""
    if n < 1:
        raise ValueError("n must be >= 1")
    T = np.asarray(T, dtype=float)
    r = eta * flux
    return r * (r * T) ** (n - 1) * np.exp(-r * T) / math.factorial(n - 1)


# -------------------------------------------------------------------------
# thermal light
# -------------------------------------------------------------------------


def thermal_approx(
    regime: str, kind: DistKind, n: int, T, params: Thermal, det: Detector
):
    """Small- and large-occupation thermal forms.

    The published small-nbar P3 prefactor omits an eta that all of its
    siblings carry; it is included here (verified against the exact jet
    engine, see the package tests).
    """
    T = np.asarray(T, dtype=float)
    gamma, nbar, eta = params.gamma, params.nbar, det.eta
    rate = 2.0 * eta * gamma * nbar
    gt = gamma * T
    if regime == "small-nbar":
        if kind is DistKind.PHOTOCOUNT:
            raise UnsupportedRegimeError("no small-nbar thermal photocount form")
        if not 1 <= n <= 3:
            raise UnsupportedRegimeError("small-nbar thermal forms cover n = 1..3")
        env = rate * np.exp(-rate * T)
        e4 = np.exp(-4.0 * gt)
        if kind is DistKind.UNCONDITIONAL_WAIT:
            if n == 1:
                return env
            if n == 2:
                return env * (eta * nbar / 2.0) * (1.0 + 4.0 * gt - e4)
            return (
                env
                * (eta * nbar) ** 2
                / 4.0
                * (1.0 + 8.0 * gt + 8.0 * gt**2 - e4 * (12.0 * gt + 1.0))
            )
        if n == 1:
            return env * (1.0 + e4)
        if n == 2:
            return env * (eta * nbar) * (1.0 + 2.0 * gt + e4 * (6.0 * gt - 1.0))
        e8 = np.exp(-8.0 * gt)
        return (
            env
            * (eta * nbar) ** 2
            * (
                1.0
                + 3.0 * gt
                + 2.0 * gt**2
                - e4 * (2.0 + 3.0 * gt - 18.0 * gt**2)
                + e8
            )
        )
    if regime == "large-nbar":
        theta = rate * T  # 2 gamma eta nbar T
        if kind is DistKind.PHOTOCOUNT:
            return theta**n / (1.0 + theta) ** (n + 1)
        if n < 1:
            raise ValueError("n must be >= 1")
        if kind is DistKind.UNCONDITIONAL_WAIT:
            return rate * n * theta ** (n - 1) / (1.0 + theta) ** (n + 1)
        return rate * n * (n + 1) * theta ** (n - 1) / (1.0 + theta) ** (n + 2)
    raise UnsupportedRegimeError(f"unknown thermal regime {regime!r}")


# -------------------------------------------------------------------------
# degenerate parametric oscillator
# -------------------------------------------------------------------------


def _double_factorial(m: int) -> float:
    out = 1.0
    while m > 1:
        out *= m
        m -= 2
    return out


def dpo_approx(regime: str, kind: DistKind, n: int, T, params: Dpo, det: Detector):
    """Small-nbar (unit and non-unit efficiency) and large-nbar DPO forms.

    The published small-nbar P3 bracket is missing an operator between its
    last two terms; a "-" is implemented (verified against the jet engine).
    """
    T = np.asarray(T, dtype=float)
    gamma, nbar, eta = params.gamma, params.nbar, det.eta
    gt = gamma * T
    if regime == "small-nbar":
        if det.eta != 1.0:
            raise UnsupportedRegimeError(
                "small-nbar DPO forms assume eta = 1; use small-nbar-nonunit"
            )
        if kind is DistKind.PHOTOCOUNT:
            # pair statistics: n = 2k even or 2k+1 odd
            k, odd = divmod(n, 2)
            base = (nbar * gt) ** k * np.exp(-nbar * gt) / math.factorial(k)
            return nbar * base if odd else base
        if not 1 <= n <= 3:
            raise UnsupportedRegimeError("small-nbar DPO forms cover n = 1..3")
        env = 2.0 * gamma * nbar * np.exp(-gamma * nbar * T)
        e2 = np.exp(-2.0 * gt)
        e4 = np.exp(-4.0 * gt)
        if kind is DistKind.UNCONDITIONAL_WAIT:
            if n == 1:
                return env * 0.5 * (1.0 + e2)
            if n == 2:
                return env * 0.5 * (1.0 - e2)
            return (
                env
                * (nbar / 2.0)
                * (3.0 + gt + 3.0 * e4 - e2 * (6.0 + gt - 4.0 * gt**2))
            )
        if n == 1:
            return env * (0.25 + e4 + e2 * (0.5 / nbar + 1.75))
        if n == 2:
            return env * (0.5 - 2.0 * e4 + e2 * (1.5 + 4.0 * gt))
        return env * (0.25 + e4 + e2 * (2.0 * gt**2 + 1.5 * gt - 1.25))
    if regime == "small-nbar-nonunit":
        if kind is DistKind.PHOTOCOUNT or not 1 <= n <= 2:
            raise UnsupportedRegimeError(
                "non-unit small-nbar DPO forms cover P and w with n = 1..2"
            )
        env = 2.0 * eta * gamma * nbar * np.exp(-(2.0 * eta - eta**2) * gamma * nbar * T)
        e2 = np.exp(-2.0 * gt)
        e4 = np.exp(-4.0 * gt)
        if kind is DistKind.UNCONDITIONAL_WAIT:
            if n == 1:
                return env * 0.5 * (2.0 - eta + eta * e2)
            return env * (eta / 2.0) * (1.0 - e2)
        if n == 1:
            return env * (
                0.25 * (eta - 2.0) ** 2
                + eta**2 * e4
                + e2 * (2.0 + 0.5 / nbar + eta - 1.25 * eta**2)
            )
        return (
            env
            * (eta / 2.0)
            * (
                2.0
                - eta
                - 4.0 * eta * e4
                + e2 * (5.0 * eta - 6.0 * eta * gt + 14.0 * gt - 2.0)
            )
        )
    if regime == "large-nbar":
        if kind is DistKind.PHOTOCOUNT:
            raise UnsupportedRegimeError("no large-nbar DPO photocount form")
        if n < 1:
            raise ValueError("n must be >= 1")
        rate = 2.0 * eta * gamma * nbar
        u = rate * T
        denom = 1.0 + 2.0 * u  # 1 + 4 eta gamma nbar T
        if kind is DistKind.UNCONDITIONAL_WAIT:
            coef = _double_factorial(2 * n - 1) / math.factorial(n - 1)
            return rate * coef * u ** (n - 1) / denom ** (n + 0.5)
        coef = _double_factorial(2 * n + 1) / math.factorial(n - 1)
        return rate * coef * u ** (n - 1) / denom ** (n + 1.5)
    raise UnsupportedRegimeError(f"unknown DPO regime {regime!r}")


# -------------------------------------------------------------------------
# resonance fluorescence: pole data
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class RfAux:
    """Auxiliary quantities of the RF wait-time formulas.

    Carries the cubic s(s+beta)(s+2beta) + Omega^2 (s + beta eta), its
    roots, and the depressed-cubic factorization coefficients used by the
    trigonometric closed forms.
    """

    beta: float
    rabi: float
    eta: float

    @property
    def omega2(self) -> float:
        return self.beta**2 - self.rabi**2

    @property
    def flux_factor(self) -> float:
        """C = 1/(Omega^2 + 2 beta^2)."""
        return 1.0 / (self.rabi**2 + 2.0 * self.beta**2)

    @property
    def mu(self) -> float:
        return (1.0 - self.eta) ** (1.0 / 3.0)

    @property
    def cubic_coeffs(self) -> np.ndarray:
        b, o2, eta = self.beta, self.rabi**2, self.eta
        return np.array([1.0, 3.0 * b, 2.0 * b**2 + o2, o2 * b * eta])

    @property
    def roots(self) -> np.ndarray:
        """s1, s2, s3 sorted by descending real part."""
        r = np.roots(self.cubic_coeffs)
        return r[np.argsort(-r.real)]

    @property
    def bcoef(self) -> complex:
        """The paper's B; complex when the cubic has three real roots."""
        w = self.rabi**2 / self.beta**2
        inner = 108.0 * (w - 1.0) ** 3 + (27.0 * (1.0 - self.eta) * w) ** 2
        return (27.0 * (1.0 - self.eta) * w + cmath.sqrt(inner)) ** (1.0 / 3.0)

    @property
    def delta1(self) -> complex:
        return 2.0 ** (1.0 / 3.0) * (1.0 - self.rabi**2 / self.beta**2) / self.bcoef

    @property
    def delta2(self) -> complex:
        return self.bcoef / (3.0 * 2.0 ** (1.0 / 3.0))

    @property
    def deltas_real(self) -> bool:
        w = self.rabi**2 / self.beta**2
        return 108.0 * (w - 1.0) ** 3 + (27.0 * (1.0 - self.eta) * w) ** 2 >= 0.0

    def roots_from_deltas(self) -> np.ndarray:
        d1, d2, b = self.delta1, self.delta2, self.beta
        rot = cmath.exp(1j * math.pi / 3.0)
        s1 = b * (-1.0 + d1 + d2)
        s2 = b * (-1.0 - d1 * rot - d2 / rot)
        s3 = b * (-1.0 - d1 / rot - d2 * rot)
        return np.array([s1, s2, s3])

    @property
    def theta1(self) -> float:
        # atan2 keeps the branch continuous through eta -> 1, where
        # d1 + d2 -> 0 and a plain atan flips sign on roundoff
        d1, d2 = self.delta1.real, self.delta2.real
        return math.atan2(d2 - d1, math.sqrt(3.0) * (d2 + d1))

    def phi(self, n: int, k: int, p: int) -> float:
        return self.theta1 * (n + k - p) - (n + p) * math.pi / 2.0

    # residue-formula coefficients of the unit-efficiency form; complex
    # for Omega > beta where sqrt(1 - Omega^2/beta^2) is imaginary
    def D0(self, n: int, k: int) -> complex:
        q = cmath.sqrt(1.0 - self.rabi**2 / self.beta**2)
        acc = 0.0
        for j in range(k + 1):
            acc += (
                (-1.0) ** j
                * math.comb(k, j)
                * math.factorial(n + k - j - 1)
                * math.factorial(n + j - 1)
            )
        return math.comb(n - 1, k) * acc / q**k

    def D(self, n: int, k: int) -> complex:
        q = cmath.sqrt(1.0 - self.rabi**2 / self.beta**2)
        acc = 0.0
        for j in range(k + 1):
            acc += (
                math.comb(k, j)
                * math.factorial(n + k - j - 1)
                * math.factorial(n + j - 1)
                / 2.0 ** (n + j)
            )
        return math.comb(n - 1, k) * acc / q**k


# -------------------------------------------------------------------------
# resonance fluorescence: residue engine
# -------------------------------------------------------------------------


def _rf_residue_terms(aux: RfAux, n: int, numer: np.ndarray | None):
    """Exponential-polynomial representation of the inverse transform.

    The transform is numer(s) * (eta beta Omega^2)^n / prod_i (s - s_i)^n.
    Returns [(s_i, poly_i)] with poly_i[m] the coefficient of T^m in the
    residue at s_i, so the density is sum_i Re[e^{s_i T} poly_i(T)].
    """
    roots = aux.roots
    kconst = (aux.eta * aux.beta * aux.rabi**2) ** n
    out = []
    for i, si in enumerate(roots):
        # Taylor coefficients (to order n-1) of numer(s)*prod_{j!=i}(s-s_j)^{-n}
        series = np.zeros(n, dtype=complex)
        series[0] = 1.0
        for j, sj in enumerate(roots):
            if j == i:
                continue
            d = si - sj
            fac = np.empty(n, dtype=complex)
            for m in range(n):
                fac[m] = ((-1.0) ** m) * math.comb(n + m - 1, m) * d ** (-n - m)
            series = np.convolve(series, fac)[:n]
        if numer is not None:
            # numer given in ascending powers of s; re-center at si
            qt = np.zeros(n, dtype=complex)
            for deg, coef in enumerate(numer):
                for m in range(min(deg, n - 1) + 1):
                    qt[m] += coef * math.comb(deg, m) * si ** (deg - m)
            series = np.convolve(series, qt)[:n]
        poly = np.zeros(n, dtype=complex)
        for m in range(n):
            poly[m] = kconst * series[n - 1 - m] / math.factorial(m)
        out.append((si, poly))
    return out


def _eval_exp_poly(terms, T, deriv: int = 0):
    T = np.asarray(T, dtype=float)
    out = np.zeros(T.shape, dtype=float)
    for si, poly in terms:
        if deriv:
            for _ in range(deriv):
                dpoly = np.zeros_like(poly)
                dpoly += si * poly
                dpoly[:-1] += np.arange(1, len(poly)) * poly[1:]
                poly = dpoly
        acc = np.zeros(T.shape, dtype=complex)
        for m in range(len(poly) - 1, -1, -1):
            acc = acc * T + poly[m]
        out += (np.exp(si * T) * acc).real
    return out


# -------------------------------------------------------------------------
# resonance fluorescence: entire bracket forms (stable near Omega = beta)
# -------------------------------------------------------------------------

_X_SERIES_MAX = 25.0  # switch from power series to closed C/S brackets

# (prefactor power m_n, amplitude exponent) for w_n = A (bT)^{m} B_n(x) e^{-bT}
_RF_ENTIRE = {1: 2, 2: 5, 3: 8}


def _bn_bracket_coeff(n: int, k: int) -> float:
    """Coefficient of x^k in the bracket of the w_n specialization."""
    if n == 1:
        return 1.0 / math.factorial(2 * k + 2)
    if n == 2:
        kk = k + 2
        return 1.0 / math.factorial(2 * kk) - 3.0 / math.factorial(2 * kk + 1)
    kk = k + 3
    return (
        1.0 / math.factorial(2 * kk)
        - 9.0 / math.factorial(2 * kk + 1)
        + 24.0 / math.factorial(2 * kk + 2)
    )


def _bn_taylor(n: int, x0: float) -> tuple[float, float, float]:
    """B_n(x0) and its first two derivatives, stable for all x0."""
    if abs(x0) <= _X_SERIES_MAX:
        b = db = ddb = 0.0
        for k in range(0, 80):
            c = _bn_bracket_coeff(n, k)
            b += c * x0**k
            if k >= 1:
                db += k * c * x0 ** (k - 1)
            if k >= 2:
                ddb += k * (k - 1) * c * x0 ** (k - 2)
            if c < 1e-300:
                break
        return b, db, ddb
    # closed forms via Taylor jets of C, S at x0
    ctay, stay, ls = cs_taylor(x0, 3)
    scale = math.exp(ls)
    cs = [(ctay[i] * scale, stay[i] * scale) for i in range(3)]
    # bracket Taylor coefficients t[i] (coefficient of u^i at x0)
    if n == 1:
        t = [cs[0][0] - 1.0, cs[1][0], cs[2][0]]
        m = 1
    elif n == 2:
        t = [2.0 + cs[0][0] - 3.0 * cs[0][1]] + [
            cs[i][0] - 3.0 * cs[i][1] for i in (1, 2)
        ]
        m = 2
    else:
        # -4 + C - 9S + 24(C-1)/x : handle the (C-1)/x part via division
        g = [cs[0][0] - 1.0, cs[1][0], cs[2][0]]
        inv = [1.0 / x0, -1.0 / x0**2, 1.0 / x0**3]
        gx = [
            g[0] * inv[0],
            g[0] * inv[1] + g[1] * inv[0],
            g[0] * inv[2] + g[1] * inv[1] + g[2] * inv[0],
        ]
        t = [
            -4.0 + cs[0][0] - 9.0 * cs[0][1] + 24.0 * gx[0],
            cs[1][0] - 9.0 * cs[1][1] + 24.0 * gx[1],
            cs[2][0] - 9.0 * cs[2][1] + 24.0 * gx[2],
        ]
        m = 3
    # B = bracket / x^m; Taylor of x^{-m} at x0
    inv0 = x0 ** (-m)
    inv1 = -m * x0 ** (-m - 1)
    inv2 = 0.5 * m * (m + 1) * x0 ** (-m - 2)
    b0 = t[0] * inv0
    b1 = t[0] * inv1 + t[1] * inv0
    b2 = t[0] * inv2 + t[1] * inv1 + t[2] * inv0
    return b0, b1, 2.0 * b2


def _rf_entire_amp(n: int, params: Rf) -> float:
    b, o = params.beta, params.rabi
    if n == 1:
        return b * (o / b) ** 2
    if n == 2:
        return 0.5 * b * (o / b) ** 4
    return 0.125 * b * (o / b) ** 6


def _rf_wn_entire(n: int, T, params: Rf, deriv_needed: bool = False):
    """w_n (and optionally derivatives) from the entire bracket forms."""
    T = np.asarray(T, dtype=float)
    beta = params.beta
    c = params.omega2  # x = omega^2 T^2
    m = _RF_ENTIRE[n]
    amp = _rf_entire_amp(n, params)
    w = np.empty(T.shape)
    w1 = np.empty(T.shape)
    w2 = np.empty(T.shape)
    for idx, t in np.ndenumerate(T):
        x = c * t * t
        b0, b1, b2 = _bn_taylor(n, x)
        bt = beta * t
        f = bt**m * b0
        if deriv_needed:
            # f' and f'' in T of (beta T)^m B(c T^2)
            fp = m * beta * bt ** (m - 1) * b0 + bt**m * b1 * 2.0 * c * t
            fpp = (
                m * (m - 1) * beta**2 * bt ** (m - 2) * b0
                + 2.0 * m * beta * bt ** (m - 1) * b1 * 2.0 * c * t
                + bt**m * (b2 * (2.0 * c * t) ** 2 + b1 * 2.0 * c)
            )
        env = math.exp(-beta * t)
        w[idx] = amp * env * f
        if deriv_needed:
            w1[idx] = amp * env * (fp - beta * f)
            w2[idx] = amp * env * (fpp - 2.0 * beta * fp + beta**2 * f)
    if deriv_needed:
        return w, w1, w2
    return w


# -------------------------------------------------------------------------
# resonance fluorescence: public densities
# -------------------------------------------------------------------------


def _q2(params: Rf) -> float:
    return 1.0 - params.rabi**2 / params.beta**2


def rf_wn(n: int, T, params: Rf, det: Detector):
    """Conditional wait-time density w_n(T) for resonance fluorescence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    aux = RfAux(params.beta, params.rabi, det.eta)
    if det.eta == 1.0 and n <= 3:
        # exact regrouping; uniformly stable, including T -> 0 and
        # Omega -> beta where the residues cancel catastrophically
        return _rf_wn_entire(n, T, params)
    if det.eta == 1.0 and params.rabi == params.beta:
        # triple pole at -beta: gamma density with shape 3n
        T = np.asarray(T, dtype=float)
        b = params.beta
        return b * (b * T) ** (3 * n - 1) * np.exp(-b * T) / math.factorial(3 * n - 1)
    terms = _rf_residue_terms(aux, n, None)
    return _eval_exp_poly(terms, T)


def rf_wn_unit_residue(n: int, T, params: Rf):
    """The published unit-efficiency residue formula (D0/D coefficients),
    regrouped into manifestly real entire-function pieces."""
    T = np.asarray(T, dtype=float)
    beta, rabi = params.beta, params.rabi
    q2 = _q2(params)
    x = beta**2 * q2 * T**2
    cx = np.vectorize(entire_cosh)(x)
    sx = np.vectorize(entire_sinhc)(x)
    pref = (
        beta
        * (rabi / beta) ** (2 * n)
        / (math.factorial(n - 1) ** 3 * q2**n)
        * np.exp(-beta * T)
    )
    acc = np.zeros_like(np.asarray(T, dtype=float))
    for k in range(n):
        f1 = 0.0
        f2 = 0.0
        for j in range(k + 1):
            base = (
                math.comb(k, j)
                * math.factorial(n + k - j - 1)
                * math.factorial(n + j - 1)
            )
            f1 += ((-1.0) ** j) * base
            f2 += base / 2.0 ** (n + j)
        cnk = math.comb(n - 1, k)
        bt = beta * T
        if k % 2 == 0:
            ek = q2 ** (-(k // 2)) * 2.0 * cx
            d0 = ((-1.0) ** n) * f1 * q2 ** (-(k // 2))
        else:
            ek = -(q2 ** ((1 - k) // 2)) * 2.0 * bt * sx
            d0 = 0.0  # the alternating inner sum vanishes for odd k
        acc += cnk * bt ** (n - k - 1) * (d0 + f2 * ek)
    return pref * acc


def rf_pn(n: int, T, params: Rf, det: Detector):
    """Unconditional wait-time density P_n(T) for resonance fluorescence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    aux = RfAux(params.beta, params.rabi, det.eta)
    cc = aux.flux_factor
    if det.eta == 1.0 and n <= 3:
        w, w1, w2 = _rf_wn_entire(n, T, params, deriv_needed=True)
        return cc * w2 + 3.0 * params.beta * cc * w1 + w
    # residue engine with the numerator polynomial C s^2 + 3 beta C s + 1
    numer = np.array([1.0, 3.0 * params.beta * cc, cc])
    terms = _rf_residue_terms(aux, n, numer)
    return _eval_exp_poly(terms, T)


def rf_pn_gamma_case(n: int, T, params: Rf):
    """P_n for Omega = beta, eta = 1 (triple-pole bracket form)."""
    T = np.asarray(T, dtype=float)
    b = params.beta
    bt = b * T
    m = 3 * n - 1
    return (
        (b / 3.0)
        * bt ** (3 * (n - 1))
        * np.exp(-bt)
        / math.factorial(m)
        * (bt**2 + m * bt + m * (m - 1))
    )


def rf_pn_from_wn(n: int, T, params: Rf, det: Detector):
    """P_n by term-wise differentiation of the w_n residue representation;
    an independent path from rf_pn's transform-numerator route."""
    aux = RfAux(params.beta, params.rabi, det.eta)
    cc = aux.flux_factor
    terms = _rf_residue_terms(aux, n, None)
    w = _eval_exp_poly(terms, T)
    w1 = _eval_exp_poly(terms, T, deriv=1)
    w2 = _eval_exp_poly(terms, T, deriv=2)
    return cc * w2 + 3.0 * params.beta * cc * w1 + w


def rf_w1_nonunit_special(T, params: Rf, det: Detector):
    """w_1 for Omega = beta at non-unit efficiency (the mu closed form)."""
    T = np.asarray(T, dtype=float)
    b, eta = params.beta, det.eta
    mu = det.mu
    bt = b * T
    return (
        (eta * b / (3.0 * mu**2))
        * np.exp(-bt * (1.0 - mu))
        * (1.0 - 2.0 * np.exp(-1.5 * mu * bt) * np.cos(math.sqrt(3.0) / 2.0 * mu * bt - math.pi / 3.0))
    )


def rf_p1_nonunit_special(T, params: Rf, det: Detector):
    """P_1 for Omega = beta at non-unit efficiency."""
    T = np.asarray(T, dtype=float)
    b, eta = params.beta, det.eta
    mu = det.mu
    bt = b * T
    arg = math.sqrt(3.0) / 2.0 * mu * bt - math.pi / 3.0
    return (
        (eta * b / (9.0 * mu**2))
        * np.exp(-(1.0 - mu) * bt)
        * (
            (1.0 + mu + mu**2)
            - 2.0
            * np.exp(-1.5 * mu * bt)
            * (
                (1.0 - 0.5 * mu - 0.5 * mu**2) * np.cos(arg)
                + mu * (mu - 1.0) * (math.sqrt(3.0) / 2.0) * np.sin(arg)
            )
        )
    )


def rf_wn_shorttime(n: int, T, params: Rf):
    """Leading short-time behavior: gamma-like with slope 3n - 1."""
    T = np.asarray(T, dtype=float)
    b, o = params.beta, params.rabi
    bt = b * T
    return (
        (o / b) ** (2 * n)
        * b
        * bt ** (3 * n - 1)
        * np.exp(-bt)
        / math.factorial(3 * n - 1)
    )


def rf_wn_strongfield(n: int, T, params: Rf):
    """Strong-field limit: gamma density modulated at the Rabi frequency."""
    T = np.asarray(T, dtype=float)
    b, o = params.beta, params.rabi
    bt = b * T
    mod = 1.0 - ((-1.0) ** (n - 1)) / 2.0 ** (n - 1) * np.cos(o * T)
    return b * bt ** (n - 1) * np.exp(-bt) / math.factorial(n - 1) * mod


def rf_wn_jform(n: int, T, params: Rf, det: Detector):
    """The published non-unit-efficiency closed form (J0/J coefficients).

    Valid where the factorization deltas are real, i.e. where the cubic
    has one real root and a conjugate pair.
    """
    aux = RfAux(params.beta, params.rabi, det.eta)
    if not aux.deltas_real:
        raise UnsupportedRegimeError(
            "J-form requires a complex-conjugate pole pair (deltas real)"
        )
    T = np.asarray(T, dtype=float)
    b = params.beta
    d1, d2 = aux.delta1.real, aux.delta2.real
    r2 = d1 * d1 + d1 * d2 + d2 * d2
    rr = math.sqrt(r2)
    cn = (
        b
        * (det.eta * params.rabi**2 / b**2) ** n
        / (math.factorial(n - 1) ** 3 * 3.0**n * r2**n)
    )
    bt = b * T
    acc = np.zeros_like(bt)
    for k in range(n):
        j0 = 0.0
        for p in range(k + 1):
            j0 += (
                math.comb(k, p)
                * math.factorial(n + k - p - 1)
                * math.factorial(n + p - 1)
                * math.cos((2 * p - k) * aux.theta1)
            )
        jt = np.zeros_like(bt)
        for p in range(k + 1):
            jt += (
                math.comb(k, p)
                * ((-1.0) ** p)
                * math.factorial(n + k - p - 1)
                * math.factorial(n + p - 1)
                * (rr / (d2 - d1)) ** p
                * np.cos(math.sqrt(3.0) / 2.0 * (d2 - d1) * bt + aux.phi(n, k, p))
            )
        # the published form carries a sqrt(3) here; re-deriving the
        # residues shows none (confirmed against the residue engine)
        jt *= (rr / (d2 - d1)) ** n
        acc += (
            math.comb(n - 1, k)
            * bt ** (n - 1 - k)
            / (math.sqrt(3.0 * r2)) ** k
            * (
                ((-1.0) ** k) * j0 * np.exp((d1 + d2) * bt)
                + 2.0 * ((-1.0) ** n) * jt * np.exp(-(d1 + d2) * bt / 2.0)
            )
        )
    return cn * np.exp(-bt) * acc


def rf_moments(
    n: int, params: Rf, det: Detector, which: str = "w"
) -> MomentSummary:
    """Mean and variance of the n-th wait time under w_n or P_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    eta = det.eta
    flux = eta * params.steady_flux
    b2, o2 = params.beta**2, params.rabi**2
    denom2 = (o2 + 2.0 * b2) ** 2
    var_w = n / flux**2 * (1.0 - 6.0 * eta * b2 * o2 / denom2)
    if which == "w":
        return MomentSummary(mean=n / flux, variance=var_w)
    if which == "P":
        mean = n / flux * (1.0 - 3.0 * eta * b2 * o2 / (n * denom2))
        return MomentSummary(
            mean=mean, variance=var_w + (2.0 * o2 - 5.0 * b2) / denom2
        )
    raise ValueError("which must be 'w' or 'P'")


def rf_pn_second_moment(n: int, params: Rf, det: Detector) -> float:
    """<T^2> under P_n (the published moment formula)."""
    eta = det.eta
    flux = eta * params.steady_flux
    o2, b2 = params.rabi**2, params.beta**2
    cc = 1.0 / (o2 + 2.0 * b2)
    return n * (n + 1) / flux**2 + 2.0 * cc * (1.0 - 6.0 * n * params.beta / flux)


# -------------------------------------------------------------------------
# most probable wait-times
# -------------------------------------------------------------------------


def most_probable_wait(
    source: str, kind: DistKind, n: int, flux: float, eta: float = 1.0
) -> float:
    """Regime-limited most-probable-wait formulas.

    ``flux`` is the raw source flux for coherent/thermal/DPO (the thermal
    and DPO expressions hold in the high-degeneracy limit), or beta for
    RF with Omega = beta (where ``eta`` must be 1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eff = eta * flux
    if source == "coherent":
        return (n - 1) / eff
    if source == "thermal":
        if kind is DistKind.UNCONDITIONAL_WAIT:
            return (n - 1) / (2.0 * eff)
        if kind is DistKind.CONDITIONAL_WAIT:
            return (n - 1) / (3.0 * eff)
        raise UnsupportedRegimeError("most probable wait needs a wait kind")
    if source == "dpo":
        if kind is DistKind.CONDITIONAL_WAIT:
            return (n - 1) / (5.0 * eff)
        raise UnsupportedRegimeError("DPO most-probable formula covers w only")
    if source == "rf":
        if eta != 1.0:
            raise UnsupportedRegimeError("RF most-probable formula assumes eta = 1")
        return (3 * n - 1) / flux  # flux argument is beta here
    raise UnsupportedRegimeError(f"unknown source {source!r}")


# -------------------------------------------------------------------------
# engine dispatch for sample_curve / CLI
# -------------------------------------------------------------------------


def evaluate(
    params: SourceParams,
    det: Detector,
    kind: DistKind,
    n: int,
    grid: np.ndarray,
    regime: str,
) -> np.ndarray:
    """Evaluate a closed-form distribution on a grid by regime tag."""
    grid = np.asarray(grid, dtype=float)
    from .model import Coherent  # local to avoid import cycle noise

    if isinstance(params, Coherent):
        if kind is DistKind.PHOTOCOUNT:
            r = det.eta * params.flux
            return (r * grid) ** n * np.exp(-r * grid) / math.factorial(n)
        return coherent_wait(n, grid, params.flux, det.eta)
    if isinstance(params, Thermal):
        tag = regime if regime != "auto" else (
            "small-nbar" if params.nbar < 1.0 else "large-nbar"
        )
        return thermal_approx(tag, kind, n, grid, params, det)
    if isinstance(params, Dpo):
        if regime == "auto":
            if params.nbar >= 1.0:
                tag = "large-nbar"
            else:
                tag = "small-nbar" if det.eta == 1.0 else "small-nbar-nonunit"
        else:
            tag = regime
        return dpo_approx(tag, kind, n, grid, params, det)
    if isinstance(params, Rf):
        if kind is DistKind.PHOTOCOUNT:
            raise UnsupportedRegimeError("no closed-form RF photocount family")
        if regime in ("auto", "exact-n"):
            if kind is DistKind.CONDITIONAL_WAIT:
                return np.asarray(rf_wn(n, grid, params, det))
            return np.asarray(rf_pn(n, grid, params, det))
        if regime == "short-time":
            if kind is not DistKind.CONDITIONAL_WAIT:
                raise UnsupportedRegimeError("short-time form covers w only")
            return rf_wn_shorttime(n, grid, params)
        if regime == "strong-field":
            if kind is not DistKind.CONDITIONAL_WAIT:
                raise UnsupportedRegimeError("strong-field form covers w only")
            return rf_wn_strongfield(n, grid, params)
        if regime == "jform":
            if kind is not DistKind.CONDITIONAL_WAIT:
                raise UnsupportedRegimeError("jform covers w only")
            return rf_wn_jform(n, grid, params, det)
        raise UnsupportedRegimeError(f"unknown RF regime {regime!r}")
    raise TypeError(f"unknown source params: {params!r}")
