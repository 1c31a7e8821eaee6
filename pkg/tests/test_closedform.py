import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from photonwait import closedform as cf
from photonwait.model import Coherent, Detector, DistKind, Dpo, Rf, Thermal, mean_flux

DET = Detector(1.0)


def test_coherent_wait_is_gamma():
    T = np.linspace(0.0, 8.0, 50)
    for n in (1, 3):
        got = cf.coherent_wait(n, T, flux=1.3, eta=0.7)
        ref = scipy.stats.gamma.pdf(T, a=n, scale=1.0 / (1.3 * 0.7))
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-300)


def test_unsupported_regimes_raise():
    with pytest.raises(cf.UnsupportedRegimeError):
        cf.thermal_approx("small-nbar", DistKind.CONDITIONAL_WAIT, 4,
                          np.array([1.0]), Thermal(1.0, 0.01), DET)
    with pytest.raises(cf.UnsupportedRegimeError):
        cf.dpo_approx("small-nbar", DistKind.CONDITIONAL_WAIT, 1,
                      np.array([1.0]), Dpo(1.0, 0.01), Detector(0.5))
    with pytest.raises(cf.UnsupportedRegimeError):
        cf.evaluate(Rf(1.0, 1.0), DET, DistKind.PHOTOCOUNT, 1,
                    np.array([1.0]), "auto")


def test_dpo_nonunit_reduces_to_unit():
    T = np.linspace(0.0, 300.0, 40)
    d = Dpo(1.0, 0.01)
    for kind in (DistKind.UNCONDITIONAL_WAIT, DistKind.CONDITIONAL_WAIT):
        for n in (1, 2):
            a = cf.dpo_approx("small-nbar-nonunit", kind, n, T, d, Detector(1.0))
            b = cf.dpo_approx("small-nbar", kind, n, T, d, Detector(1.0))
            assert np.allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("rabi", [0.2 * math.sqrt(2), 10 * math.sqrt(2)])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_rf_unit_residue_matches_entire(rabi, n):
    params = Rf(1.0, rabi)
    T = np.linspace(0.01, 12.0, 60)
    a = cf.rf_wn(n, T, params, DET)
    b = cf.rf_wn_unit_residue(n, T, params)
    assert np.max(np.abs(a - b)) / np.max(np.abs(a)) < 1e-10


def test_rf_gamma_case():
    params = Rf(1.0, 1.0)
    T = np.linspace(0.0, 20.0, 80)
    for n in (1, 2, 3):
        got = cf.rf_wn(n, T, params, DET)
        ref = scipy.stats.gamma.pdf(T, a=3 * n, scale=1.0)
        assert np.allclose(got, ref, rtol=1e-10, atol=1e-14)


def test_rf_pn_from_wn_consistency():
    params = Rf(1.0, 3.0)
    T = np.linspace(0.0, 10.0, 40)
    for n in (1, 2, 3):
        a = cf.rf_pn(n, T, params, DET)
        b = cf.rf_pn_from_wn(n, T, params, DET)
        assert np.max(np.abs(a - b)) / np.max(np.abs(a)) < 1e-10


@pytest.mark.parametrize("eta", [0.5, 0.1])
def test_rf_nonunit_specials(eta):
    # eta = 1 excluded: the mu-forms divide by mu = (1 - eta)^(1/3)
    # closed mu-forms at Omega = beta against the residue engine
    params = Rf(1.0, 1.0)
    det = Detector(eta)
    T = np.linspace(0.01, 25.0, 70)
    w1 = cf.rf_w1_nonunit_special(T, params, det)
    p1 = cf.rf_p1_nonunit_special(T, params, det)
    w1r = cf.rf_wn(1, T, params, det)
    p1r = cf.rf_pn(1, T, params, det)
    assert np.max(np.abs(w1 - w1r)) / np.max(np.abs(w1r)) < 1e-9
    assert np.max(np.abs(p1 - p1r)) / np.max(np.abs(p1r)) < 1e-9


def test_rf_jform_matches_residue():
    params = Rf(1.0, 5.0 * math.sqrt(2))
    T = np.linspace(0.01, 30.0, 90)
    for eta in (1.0, 0.5, 0.1):
        det = Detector(eta)
        for n in (1, 2):
            a = cf.rf_wn_jform(n, T, params, det)
            b = cf.rf_wn(n, T, params, det)
            assert np.max(np.abs(a - b)) / np.max(np.abs(b)) < 1e-9


def test_rf_moments_vs_quadrature():
    params = Rf(1.0, 4.0)
    det = Detector(0.6)
    flux = det.eta * params.steady_flux
    for n in (1, 2):
        m = cf.rf_moments(n, params, det, which="w")
        assert m.mean == pytest.approx(n / flux, rel=1e-12)
        f = lambda t: cf.rf_wn(n, np.array([t]), params, det)[0]
        mean_q, _ = scipy.integrate.quad(lambda t: t * f(t), 0, 200, limit=400)
        var_q, _ = scipy.integrate.quad(
            lambda t: (t - mean_q) ** 2 * f(t), 0, 200, limit=400
        )
        assert m.mean == pytest.approx(mean_q, rel=1e-9)
        assert m.variance == pytest.approx(var_q, rel=1e-8)


def test_rf_min_wait_variance():
    # variance in units of the squared mean wait is smallest at
    # rabi = sqrt(2) beta, where it equals (1 - 3 eta / 4) / (eta I_ss)^2
    beta, eta = 1.0, 0.8
    def norm_var(r):
        m = cf.rf_moments(1, Rf(beta, r), Detector(eta), which="w")
        return m.variance / m.mean**2
    r0 = math.sqrt(2.0)
    flux = eta * Rf(beta, r0).steady_flux
    m0 = cf.rf_moments(1, Rf(beta, r0), Detector(eta), which="w")
    assert m0.variance == pytest.approx((1 - 0.75 * eta) / flux**2, rel=1e-12)
    assert norm_var(r0) < norm_var(r0 * 1.05)
    assert norm_var(r0) < norm_var(r0 * 0.95)


def test_rf_shorttime_slope():
    params = Rf(1.0, 2.0)
    for n in (1, 2, 3):
        t = np.array([1e-3, 2e-3])
        v = cf.rf_wn_shorttime(n, t, params)
        slope = math.log(v[1] / v[0]) / math.log(2.0)
        assert slope == pytest.approx(3 * n - 1, rel=2e-3)


def test_most_probable_wait():
    assert cf.most_probable_wait("coherent", DistKind.CONDITIONAL_WAIT, 3, 2.0, 1.0) \
        == pytest.approx(1.0)
    assert cf.most_probable_wait("thermal", DistKind.UNCONDITIONAL_WAIT, 3, 2.0, 1.0) \
        == pytest.approx(0.5)
    assert cf.most_probable_wait("thermal", DistKind.CONDITIONAL_WAIT, 3, 2.0, 1.0) \
        == pytest.approx(1.0 / 3.0)
    assert cf.most_probable_wait("rf", DistKind.CONDITIONAL_WAIT, 2, 1.0, 1.0,
                                 ) == pytest.approx(5.0)
