import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonwait.jets import (
    Jet,
    analytic,
    const,
    cs_taylor,
    jet_exp,
    jet_inv,
    jet_log,
    jet_sqrt,
    var_s,
    var_t,
)


def _f(s, t):
    # smooth bivariate test function with nontrivial mixed derivatives
    return mpmath.exp(-s * t) * mpmath.cosh(mpmath.sqrt(1 + 0.5 * s * t * t))


def _f_jet(s0, t0, ns, nt):
    s = var_s(s0, ns, nt)
    t = var_t(t0, ns, nt)
    x = const(1.0, ns, nt) + 0.5 * s * t * t
    need = ns + nt + 1
    ctay, _, logscale = cs_taylor(x.value, need)
    ch = analytic(x, ctay)
    return jet_exp(-(s * t)) * ch, math.exp(logscale)


@pytest.mark.parametrize("s0,t0", [(1.0, 0.7), (0.0, 1.3), (1.0, 0.0), (0.3, 2.0)])
def test_jet_vs_mpmath_mixed_partials(s0, t0):
    ns, nt = 4, 2
    jet, scale = _f_jet(s0, t0, ns, nt)
    with mpmath.workdps(40):
        for i in range(ns + 1):
            for j in range(nt + 1):
                ref = mpmath.diff(_f, (s0, t0), (i, j))
                ref = float(ref) / (math.factorial(i) * math.factorial(j))
                got = jet.c[i, j] * scale
                assert got == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_arithmetic_identities():
    j = var_s(0.8, 3, 2) * var_t(1.1, 3, 2) + const(0.5, 3, 2)
    assert np.allclose((j * jet_inv(j)).c, const(1.0, 3, 2).c, atol=1e-13)
    assert np.allclose((jet_sqrt(j) * jet_sqrt(j)).c, j.c, atol=1e-13)
    assert np.allclose(jet_exp(jet_log(j)).c, j.c, atol=1e-13)


@given(st.floats(min_value=-200.0, max_value=200.0))
@settings(max_examples=200, deadline=None)
def test_cs_identity(x0):
    # hyperbolic identity C(x)^2 - x S(x)^2 = 1 holds for the scaled jets
    c, s, logscale = cs_taylor(x0, 1)
    lhs = (c[0] ** 2 - x0 * s[0] ** 2) * math.exp(2 * logscale)
    # cancellation scales like C(x)^2 * eps
    # for x0 < 0 the alternating series loses ~exp(sqrt(|x0|)) digits
    csq = (c[0] * math.exp(logscale)) ** 2
    scale = max(1.0, csq, math.exp(math.sqrt(abs(x0))))
    assert abs(lhs - 1.0) <= 1e-13 * scale


@pytest.mark.parametrize("x0", [-150.0, -1.0, 0.0, 0.2, 30.0, 600.0])
def test_cs_taylor_matches_derivative_chain(x0):
    # d/dx C = S/2, d/dx S = (C - S)/(2x): check coefficient recurrences
    nmax = 6
    c, s, _ = cs_taylor(x0, nmax + 2)
    for k in range(nmax):
        assert (k + 1) * c[k + 1] == pytest.approx(0.5 * s[k], rel=1e-11, abs=1e-16)


def test_jet_shift_consistency():
    # Taylor coefficients at x0 reproduce values at x0 + h
    x0, h = 3.0, 0.01
    c, s, logscale = cs_taylor(x0, 12)
    c1, s1, logscale1 = cs_taylor(x0 + h, 1)
    cval = sum(ck * h**k for k, ck in enumerate(c)) * math.exp(logscale)
    sval = sum(sk * h**k for k, sk in enumerate(s)) * math.exp(logscale)
    assert cval == pytest.approx(c1[0] * math.exp(logscale1), rel=1e-12)
    assert sval == pytest.approx(s1[0] * math.exp(logscale1), rel=1e-12)
