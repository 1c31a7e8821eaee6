import math

import mpmath
import numpy as np
import pytest

from photonwait.model import (
    Coherent,
    Curve,
    Detector,
    DistKind,
    DistRequest,
    Dpo,
    NegativeDensityError,
    Rf,
    Thermal,
    clamp_density,
    entire_cosh,
    entire_coshm1x,
    entire_sinhc,
    mean_flux,
    scale_params,
)


def test_parameter_validation():
    with pytest.raises(ValueError):
        Coherent(flux=-1.0)
    with pytest.raises(ValueError):
        Thermal(gamma=0.0, nbar=1.0)
    with pytest.raises(ValueError):
        Thermal(gamma=1.0, nbar=-0.1)
    with pytest.raises(ValueError):
        Dpo(gamma=1.0, nbar=-1.0)
    with pytest.raises(ValueError):
        Rf(beta=-1.0, rabi=1.0)
    with pytest.raises(ValueError):
        Detector(eta=0.0)
    with pytest.raises(ValueError):
        Detector(eta=1.5)


def test_derived_quantities():
    d = Dpo(gamma=2.0, nbar=0.5)
    r = math.sqrt(2 * 0.5 / (1 + 2 * 0.5))
    assert d.pump_ratio == pytest.approx(r)
    assert d.lambda1 == pytest.approx(2.0 * (1 - r))
    assert d.lambda2 == pytest.approx(2.0 * (1 + r))

    rf = Rf(beta=1.0, rabi=3.0)
    assert rf.omega2 == pytest.approx(1.0 - 9.0)
    assert rf.steady_flux == pytest.approx(9.0 / 11.0)

    det = Detector(eta=0.488)
    assert det.mu == pytest.approx((1 - 0.488) ** (1 / 3))
    assert Detector(eta=1.0).mu == 0.0


def test_mean_flux():
    assert mean_flux(Coherent(flux=2.5)) == 2.5
    assert mean_flux(Thermal(gamma=1.5, nbar=0.2)) == pytest.approx(2 * 1.5 * 0.2)
    assert mean_flux(Dpo(gamma=1.5, nbar=0.2)) == pytest.approx(2 * 1.5 * 0.2)
    assert mean_flux(Rf(beta=1.0, rabi=1.0)) == pytest.approx(1.0 / 3.0)


def test_scale_params_scales_flux():
    for p in (Coherent(1.3), Thermal(1.0, 0.3), Dpo(1.0, 0.3), Rf(1.0, 2.0)):
        q = scale_params(p, 2.0)
        assert mean_flux(q) == pytest.approx(2.0 * mean_flux(p))


def test_dist_request_validation():
    DistRequest(kind=DistKind.PHOTOCOUNT, n=0)
    with pytest.raises(ValueError):
        DistRequest(kind=DistKind.CONDITIONAL_WAIT, n=0)


def test_curve_shape_mismatch():
    with pytest.raises(ValueError):
        Curve(grid=np.arange(3.0), values=np.arange(4.0))


def test_clamp_density():
    v = np.array([1.0, -1e-12, 0.5])
    out = clamp_density(v)
    assert out[1] == 0.0
    with pytest.raises(NegativeDensityError):
        clamp_density(np.array([1.0, -1e-3]))


@pytest.mark.parametrize("x", [-900.0, -25.0, -0.3, -1e-8, 0.0, 1e-8, 0.3, 25.0, 400.0])
def test_entire_functions_vs_mpmath(x):
    with mpmath.workdps(40):
        z = mpmath.sqrt(mpmath.mpf(x))
        ch = mpmath.cosh(z)
        c_ref = float(ch.real)
        s_ref = float((mpmath.sinh(z) / z).real) if x != 0 else 1.0
        ref = float(((ch - 1) / x).real) if x != 0 else 0.5
    assert entire_cosh(x) == pytest.approx(c_ref, rel=1e-14)
    assert entire_sinhc(x) == pytest.approx(s_ref, rel=1e-14)
    assert entire_coshm1x(x) == pytest.approx(ref, rel=1e-12)
