"""Generating functions G(s, T) for all four sources, as jets.

Thermal and DPO use the closed-form expressions built from the entire
functions C and S, assembled in log space so the overall exponential
prefactors never overflow.  Resonance fluorescence has no elementary
closed form for G; there it is built from the driven-atom master
equation as G(s, T) = Tr[exp((L - s eta J) T) rho_ss], with s-derivatives
obtained exactly from a block-bidiagonal matrix exponential.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import jets
from .jets import Jet, analytic, cs_taylor, jet_exp, jet_log, var_s, var_t
from .model import Coherent, Detector, Dpo, Rf, SourceParams, Thermal

__all__ = [
    "gf_coherent",
    "gf_thermal",
    "gf_dpo",
    "gf_rf",
    "gf_jet",
    "log_gf_jet",
    "gf_scalar",
    "gf_thermal_hd",
    "gf_dpo_hd",
    "gf_dpo_small",
    "rf_bloch_generators",
]


def _sjet_t(sjet: Jet, T: float) -> Jet:
    return var_t(T, sjet.ns, sjet.nt)


def gf_coherent(params: Coherent, det: Detector, sjet: Jet, T: float) -> Jet:
    return jet_exp(log_gf_coherent(params, det, sjet, T))


def log_gf_coherent(params: Coherent, det: Detector, sjet: Jet, T: float) -> Jet:
    tjet = _sjet_t(sjet, T)
    return -(det.eta * params.flux) * sjet * tjet


def _bracket_log(zsq: Jet, lam: float, tjet: Jet) -> Jet:
    """log of C(z^2 T^2) + (T/2)(z^2/lam + lam) S(z^2 T^2), overflow-safe."""
    x = zsq * tjet * tjet
    need = x.ns + x.nt + 1
    ctay, stay, logscale = cs_taylor(x.value, need)
    cjet = analytic(x, ctay)
    sjet_ = analytic(x, stay)
    w = 0.5 * tjet * (zsq * (1.0 / lam) + lam)
    bracket = cjet + w * sjet_
    return logscale + jet_log(bracket)


def log_gf_thermal(params: Thermal, det: Detector, sjet: Jet, T: float) -> Jet:
    tjet = _sjet_t(sjet, T)
    g2 = 2.0 * params.gamma
    zsq = (g2**2) * (1.0 + (2.0 * det.eta * params.nbar) * sjet)
    return g2 * tjet - _bracket_log(zsq, g2, tjet)


def gf_thermal(params: Thermal, det: Detector, sjet: Jet, T: float) -> Jet:
    return jet_exp(log_gf_thermal(params, det, sjet, T))


def log_gf_dpo(params: Dpo, det: Detector, sjet: Jet, T: float) -> Jet:
    tjet = _sjet_t(sjet, T)
    gamma = params.gamma
    keps = gamma * params.pump_ratio  # |kappa epsilon|
    lam = (gamma - keps, gamma + keps)
    sign = (1.0, -1.0)
    acc = jets.const(0.0, sjet.ns, sjet.nt)
    for lam_i, sg in zip(lam, sign):
        zsq = lam_i**2 + (sg * 2.0 * det.eta * gamma * keps) * sjet
        acc = acc + 0.5 * lam_i * tjet - 0.5 * _bracket_log(zsq, lam_i, tjet)
    return acc


def gf_dpo(params: Dpo, det: Detector, sjet: Jet, T: float) -> Jet:
    return jet_exp(log_gf_dpo(params, det, sjet, T))


# -- resonance fluorescence ------------------------------------------------


@lru_cache(maxsize=64)
def rf_bloch_generators(beta: float, rabi: float):
    """Real 4x4 generators for the driven two-level atom.

    Components are (rho_ee, rho_gg, Re rho_eg, Im rho_eg).  Returns
    (L, J, v_ss, trace_vec) where L is the full Liouvillian, J the
    emission-jump part (rho -> 2 beta sigma- rho sigma+) and v_ss the
    steady state with unit trace.
    """
    sm = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|
    sp = sm.conj().T
    h = 0.5 * rabi * (sp + sm)
    pop = sp @ sm  # |e><e|

    def lind(rho):
        out = -1j * (h @ rho - rho @ h)
        out += beta * (2.0 * sm @ rho @ sp - pop @ rho - rho @ pop)
        return out

    def jump(rho):
        return 2.0 * beta * (sm @ rho @ sp)

    gens = [
        np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),
        np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex),
        np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
        np.array([[0.0, 1j], [-1j, 0.0]], dtype=complex),
    ]

    def tovec(rho):
        return np.array(
            [rho[0, 0].real, rho[1, 1].real, rho[0, 1].real, rho[0, 1].imag]
        )

    L = np.column_stack([tovec(lind(g)) for g in gens])
    J = np.column_stack([tovec(jump(g)) for g in gens])
    trace_vec = np.array([1.0, 1.0, 0.0, 0.0])
    # steady state: L v = 0 with unit trace
    a = np.vstack([L, trace_vec])
    b = np.zeros(5)
    b[4] = 1.0
    vss, *_ = np.linalg.lstsq(a, b, rcond=None)
    return L, J, vss, trace_vec


def gf_rf(params: Rf, det: Detector, sjet: Jet, T: float) -> Jet:
    """G(s,T) jet for resonance fluorescence from the master equation.

    The counting generator M(s) = L - s eta J is linear in s, so all
    s-derivatives of exp(M(s) T) follow from one exponential of the
    block-bidiagonal matrix with M on the diagonal and dM/ds above it.
    """
    L, J, vss, tr = rf_bloch_generators(params.beta, params.rabi)
    ns, nt = sjet.ns, sjet.nt
    s0 = sjet.value
    m0 = L - s0 * det.eta * J
    m1 = -det.eta * J
    k = ns + 1
    big = np.zeros((4 * k, 4 * k))
    for i in range(k):
        big[4 * i : 4 * i + 4, 4 * i : 4 * i + 4] = m0
        if i + 1 < k:
            big[4 * i : 4 * i + 4, 4 * (i + 1) : 4 * (i + 1) + 4] = m1
    eb = scipy.linalg.expm(big * T)
    eblocks = [eb[0:4, 4 * i : 4 * i + 4] for i in range(k)]

    c = np.zeros((ns + 1, nt + 1))
    w0 = m0 @ vss
    w1 = m1 @ vss
    u0 = m0 @ w0
    u1 = m0 @ (m1 @ vss) + m1 @ w0
    u2 = m1 @ (m1 @ vss)
    for i in range(k):
        c[i, 0] = tr @ (eblocks[i] @ vss)
        if nt >= 1:
            acc = eblocks[i] @ w0
            if i >= 1:
                acc = acc + eblocks[i - 1] @ w1
            c[i, 1] = tr @ acc
        if nt >= 2:
            acc = eblocks[i] @ u0
            if i >= 1:
                acc = acc + eblocks[i - 1] @ u1
            if i >= 2:
                acc = acc + eblocks[i - 2] @ u2
            c[i, 2] = 0.5 * (tr @ acc)
    return Jet(c)


# -- dispatch --------------------------------------------------------------


def gf_jet(
    params: SourceParams, det: Detector, s0: float, T: float, ns: int, nt: int = 2
) -> Jet:
    sjet = var_s(s0, ns, nt)
    if isinstance(params, Coherent):
        return gf_coherent(params, det, sjet, T)
    if isinstance(params, Thermal):
        return gf_thermal(params, det, sjet, T)
    if isinstance(params, Dpo):
        return gf_dpo(params, det, sjet, T)
    if isinstance(params, Rf):
        return gf_rf(params, det, sjet, T)
    raise TypeError(f"unknown source params: {params!r}")


def log_gf_jet(
    params: SourceParams, det: Detector, s0: float, T: float, ns: int, nt: int = 2
) -> Jet:
    sjet = var_s(s0, ns, nt)
    if isinstance(params, Coherent):
        return log_gf_coherent(params, det, sjet, T)
    if isinstance(params, Thermal):
        return log_gf_thermal(params, det, sjet, T)
    if isinstance(params, Dpo):
        return log_gf_dpo(params, det, sjet, T)
    if isinstance(params, Rf):
        return jet_log(gf_rf(params, det, var_s(s0, ns, nt), T))
    raise TypeError(f"unknown source params: {params!r}")


def gf_scalar(params: SourceParams, det: Detector, s: float, T: float) -> float:
    return gf_jet(params, det, s, T, ns=0, nt=0).value


# -- closed-form limiting forms -------------------------------------------


def gf_thermal_hd(params: Thermal, det: Detector, s: float, T: float) -> float:
    """High-degeneracy (large nbar) thermal generating function."""
    return 1.0 / (1.0 + 2.0 * s * params.gamma * det.eta * params.nbar * T)


def gf_dpo_hd(params: Dpo, det: Detector, s: float, T: float) -> float:
    """High-degeneracy (large nbar) DPO generating function."""
    return 1.0 / math.sqrt(1.0 + 4.0 * s * det.eta * params.gamma * params.nbar * T)


def gf_dpo_small(params: Dpo, det: Detector, s: float, T: float) -> float:
    """Small-nbar DPO generating function (unit-efficiency expansion)."""
    nbar, gamma = params.nbar, params.gamma
    se = s * det.eta
    return (1.0 - 0.5 * nbar * se**2) * math.exp(gamma * nbar * T * (se**2 - 2.0 * se))
