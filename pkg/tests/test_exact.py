import math

import numpy as np
import pytest

from photonwait import exact
from photonwait.exact import (
    g_zero,
    photocount,
    photocount_dist,
    pn_wait,
    sample_curve,
    wn_via_pn,
    wn_wait,
)
from photonwait.model import (
    Coherent,
    Detector,
    DistKind,
    DistRequest,
    Dpo,
    Rf,
    Thermal,
    mean_flux,
)

DET = Detector(1.0)
SOURCES = [Coherent(1.0), Thermal(1.0, 0.3), Dpo(1.0, 0.3), Rf(1.0, 2.0)]


def test_coherent_poisson():
    p = Coherent(2.0)
    det = Detector(0.7)
    lam = 0.7 * 2.0 * 1.3
    for n in range(5):
        ref = lam**n * math.exp(-lam) / math.factorial(n)
        assert photocount(p, det, n, 1.3) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("params", SOURCES)
def test_photocount_dist_sums_to_one(params):
    # small mean count so the mass beyond MAX_ORDER is below 1e-9
    T = 0.05 / mean_flux(params)
    probs = photocount_dist(params, DET, T, exact.MAX_ORDER)
    assert probs.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(probs >= 0)


@pytest.mark.parametrize("params", SOURCES)
def test_wn_via_pn_matches_wn_wait(params):
    scale = 1.0 / mean_flux(params)
    for n in (1, 2, 3):
        grid = np.linspace(0.05, 3.0, 7) * scale * n
        w_eq = np.array([wn_via_pn(params, DET, n, t) for t in grid])
        w_di = np.array([wn_wait(params, DET, n, t) for t in grid])
        peak = np.max(np.abs(w_di))
        assert np.max(np.abs(w_eq - w_di)) / peak < 1e-8


@pytest.mark.parametrize("params", SOURCES)
def test_pn_wait_t0(params):
    # P_1(0) = eta <I>, P_n(0) = 0 for n >= 2
    assert pn_wait(params, DET, 1, 0.0) == pytest.approx(
        mean_flux(params), rel=1e-9
    )
    assert abs(pn_wait(params, DET, 2, 0.0)) < 1e-10 * mean_flux(params)


def test_g_zero_values():
    # g2(0): thermal 2, coherent 1, RF 0, DPO 1 + 1/(2 nbar) + ...
    assert g_zero(Thermal(1.0, 0.4), DET, 2) == pytest.approx(2.0, rel=1e-6)
    assert g_zero(Coherent(1.5), DET, 2) == pytest.approx(1.0, rel=1e-9)
    assert abs(g_zero(Rf(1.0, 1.0), DET, 2)) < 1e-6
    nbar = 0.25
    dpo = g_zero(Dpo(1.0, nbar), DET, 2)
    assert dpo > 1.0 / (2 * nbar)  # pair enhancement dominates
    # thermal g3(0) = 3! = 6
    assert g_zero(Thermal(1.0, 0.4), DET, 3) == pytest.approx(6.0, rel=1e-4)


def test_wn_t0_from_g2():
    # w_1(0) = g2(0) * eta * <I>
    th = Thermal(1.0, 0.05)
    assert wn_wait(th, DET, 1, 0.0) == pytest.approx(
        2.0 * mean_flux(th), rel=1e-9
    )
    rf = Rf(1.0, 1.0)
    assert abs(wn_wait(rf, DET, 1, 0.0)) < 1e-10


def test_max_order_guard():
    with pytest.raises(ValueError):
        photocount(Coherent(1.0), DET, exact.MAX_ORDER + 1, 1.0)


def test_sample_curve_engines_and_meta():
    th = Thermal(1.0, 0.01)
    req = DistRequest(kind=DistKind.CONDITIONAL_WAIT, n=1, engine="exact")
    grid = np.linspace(0.0, 10.0, 11)
    c = sample_curve(th, DET, req, grid)
    assert c.meta["source"] == "thermal" and c.meta["engine"] == "exact"
    req2 = DistRequest(kind=DistKind.CONDITIONAL_WAIT, n=1, engine="closed:small-nbar")
    c2 = sample_curve(th, DET, req2, grid)
    assert np.max(np.abs(c.values - c2.values)) / c.values.max() < 0.1
    with pytest.raises(ValueError):
        sample_curve(th, DET, DistRequest(DistKind.CONDITIONAL_WAIT, 1, "bogus"), grid)


def test_eta_enters_only_with_nbar_for_thermal():
    # eta and nbar enter G only through eta*nbar: distributions match after
    # rescaling
    a = photocount(Thermal(1.0, 0.4), Detector(0.5), 2, 1.7)
    b = photocount(Thermal(1.0, 0.2), Detector(1.0), 2, 1.7)
    assert a == pytest.approx(b, rel=1e-12)
