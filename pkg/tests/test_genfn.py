import math

import numpy as np
import pytest
import scipy.linalg

from photonwait import genfn
from photonwait.genfn import gf_jet, gf_scalar, gf_thermal_hd, log_gf_jet
from photonwait.model import Coherent, Detector, Dpo, Rf, Thermal

# frozen high-precision oracle for G(s=1, T=1) at gamma=nbar=eta=1
THERMAL_G_11 = 0.214695219324875925


def _liouville_G(H, c, eta, s, T, rho_ss=None):
    """G(s,T) from a dense master-equation propagator (row-major vec).

    H Hamiltonian, c jump operator; the counting generator scales the
    recycling term by (1 - ... ) -> L - s*eta*J with J rho = c rho c^dag.
    """
    N = H.shape[0]
    eye = np.eye(N)

    def sandwich(A, B):
        # vec(A rho B) = kron(A, B.T) vec(rho), row-major vec
        return np.kron(A, B.T)

    cd = c.conj().T
    jump = sandwich(c, cd)
    anti = 0.5 * (sandwich(cd @ c, eye) + sandwich(eye, cd @ c))
    ham = -1j * (sandwich(H, eye) - sandwich(eye, H))
    L = ham + jump - anti
    if rho_ss is None:
        w, v = scipy.linalg.eig(L)
        rho_vec = v[:, np.argmin(np.abs(w))]
        rho = rho_vec.reshape(N, N)
        rho = rho / np.trace(rho)
    else:
        rho = rho_ss
    M = L - s * eta * jump
    out = scipy.linalg.expm(M * T) @ rho.reshape(-1)
    return float(np.trace(out.reshape(N, N)).real), rho


def test_thermal_frozen_oracle():
    g = gf_scalar(Thermal(1.0, 1.0), Detector(1.0), 1.0, 1.0)
    assert g == pytest.approx(THERMAL_G_11, rel=1e-14)


def test_coherent_closed_form():
    p, det = Coherent(1.7), Detector(0.6)
    for s, T in [(0.3, 2.0), (1.0, 0.5), (-0.5, 1.0)]:
        assert gf_scalar(p, det, s, T) == pytest.approx(
            math.exp(-s * 0.6 * 1.7 * T), rel=1e-14
        )


@pytest.mark.parametrize("nbar", [0.1, 0.5])
@pytest.mark.parametrize("eta,s,T", [(1.0, 1.0, 0.8), (0.5, 0.7, 1.6), (1.0, 0.3, 0.5)])
def test_dpo_vs_dense_liouvillian(nbar, eta, s, T):
    # s >= 0 only: for s < 0 the counting measure reweights toward high
    # Fock states and the truncated reference converges too slowly
    gamma = 1.0
    N = 36
    keps = gamma * math.sqrt(2 * nbar / (1 + 2 * nbar))
    a = np.diag(np.sqrt(np.arange(1.0, N)), 1)
    ad = a.T
    H = 0.5j * keps * (ad @ ad - a @ a)
    c = math.sqrt(2 * gamma) * a
    g_num, rho = _liouville_G(H, c, eta, s, T)
    # self-check of the reference: steady occupation equals nbar
    occ = float(np.trace(ad @ a @ rho).real)
    assert occ == pytest.approx(nbar, rel=1e-6)
    g = gf_scalar(Dpo(gamma, nbar), Detector(eta), s, T)
    assert g == pytest.approx(g_num, rel=1e-8)


@pytest.mark.parametrize("rabi", [0.3, 1.0, 6.0])
@pytest.mark.parametrize("eta,s,T", [(1.0, 1.0, 1.2), (0.4, 0.6, 2.5)])
def test_rf_vs_dense_liouvillian(rabi, eta, s, T):
    beta = 1.0
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sm = np.array([[0.0, 0.0], [1.0, 0.0]])  # |g><e|
    H = 0.5 * rabi * sx
    c = math.sqrt(2 * beta) * sm
    g_num, rho = _liouville_G(H, c, eta, s, T)
    flux = 2 * beta * float(rho[0, 0].real)
    assert flux == pytest.approx(Rf(beta, rabi).steady_flux, rel=1e-10)
    g = gf_scalar(Rf(beta, rabi), Detector(eta), s, T)
    assert g == pytest.approx(g_num, rel=1e-10)


def test_thermal_hd_limit():
    det = Detector(1.0)
    s, T = 0.8, 1e-4
    g_hd = gf_thermal_hd(Thermal(1.0, 5000.0), det, s, T)
    g = gf_scalar(Thermal(1.0, 5000.0), det, s, T)
    assert g_hd == pytest.approx(g, rel=1e-3)


@pytest.mark.parametrize(
    "params",
    [Coherent(1.0), Thermal(1.0, 0.3), Dpo(1.0, 0.3), Rf(1.0, 2.0)],
)
def test_jet_derivatives_vs_finite_differences(params):
    det = Detector(0.8)
    s0, T = 1.0, 0.9
    jet = gf_jet(params, det, s0, T, ns=2, nt=2)
    h = 1e-4
    # ds via 5-point stencil on gf_scalar
    vals = [gf_scalar(params, det, s0 + k * h, T) for k in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (
        12 * h * h
    )
    assert jet.c[0, 0] == pytest.approx(vals[2], rel=1e-12)
    assert jet.c[1, 0] == pytest.approx(d1, rel=1e-7)
    assert jet.c[2, 0] == pytest.approx(d2 / 2.0, rel=1e-5)
    # dT the same way
    tvals = [gf_scalar(params, det, s0, T + k * h) for k in (-2, -1, 0, 1, 2)]
    dt1 = (tvals[0] - 8 * tvals[1] + 8 * tvals[3] - tvals[4]) / (12 * h)
    assert jet.c[0, 1] == pytest.approx(dt1, rel=1e-7)


def test_log_gf_consistency():
    params, det = Thermal(1.0, 0.7), Detector(0.9)
    j = gf_jet(params, det, 1.0, 1.3, ns=3, nt=2)
    lj = log_gf_jet(params, det, 1.0, 1.3, ns=3, nt=2)
    assert math.log(j.value) == pytest.approx(lj.value, rel=1e-12)


def test_thermal_overflow_safe():
    # scaled C/S jets keep logG finite far into the overflow regime
    g = log_gf_jet(Thermal(1.0, 2.0), Detector(1.0), 1.0, 500.0, ns=2, nt=2)
    assert np.all(np.isfinite(g.c))
