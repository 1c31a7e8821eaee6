"""Stochastic photo-detection records and empirical estimators.

Coherent records are plain Poisson processes.  Thermal records come from a
Cox (doubly stochastic Poisson) process whose intensity is driven by a
complex Ornstein-Uhlenbeck amplitude, advanced with the exact AR(1)
update so the only discretization effect is the piecewise-linear
placement of events inside a step.  DPO and RF records are quantum-jump
unravelings: the conditional no-count evolution is diagonalized once and
each wait time is drawn by solving ||psi(t)||^2 = u for a uniform u.

Non-unit efficiency is Bernoulli thinning of a unit-efficiency record,
which is exact for photo-detection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .model import (
    Coherent,
    Detector,
    Dpo,
    Rf,
    SourceParams,
    Thermal,
    entire_cosh,
    entire_sinhc,
)

__all__ = [
    "EventRecord",
    "SimConfig",
    "simulate",
    "thin",
    "estimate_wn",
    "estimate_pn",
    "estimate_photocount",
    "estimate_wait_moments",
    "poisson_excess",
    "dpo_fock_cutoff",
]

_BURN_IN = 64


@dataclass(frozen=True)
class EventRecord:
    """Strictly ascending detection timestamps plus provenance metadata."""

    times: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1:
            raise ValueError("timestamps must be one-dimensional")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("timestamps must be strictly ascending")
        object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return self.times.size

    @property
    def duration(self) -> float:
        return float(self.times[-1]) if len(self) else 0.0

    def save(self, path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write("# photon detection record\n")
            fh.write(f"# meta: {json.dumps(self.meta, sort_keys=True)}\n")
            for t in self.times:
                fh.write(f"{float(t)!r}\n")
        tmp.replace(path)

    @classmethod
    def load(cls, path) -> "EventRecord":
        meta = {}
        times = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    body = line[1:].strip()
                    if body.startswith("meta:"):
                        meta = json.loads(body[5:])
                    continue
                times.append(float(line))
        return cls(times=np.asarray(times), meta=meta)


@dataclass(frozen=True)
class SimConfig:
    n_events: int = 10**6
    seed: int = 0
    fock_cutoff: int | None = None  # DPO only; derived from nbar if None
    dt_factor: float = 0.04  # thermal step in units of the coherence time


def _streams(seed: int, n: int):
    return [np.random.Generator(np.random.Philox(key=seed, counter=[i, 0, 0, 0]))
            for i in range(n)]


# -------------------------------------------------------------------------
# source-specific record generators (all at eta = 1)
# -------------------------------------------------------------------------


def _simulate_coherent(params: Coherent, cfg: SimConfig) -> np.ndarray:
    (rng,) = _streams(cfg.seed, 1)
    gaps = rng.exponential(1.0 / params.flux, size=cfg.n_events)
    return np.cumsum(gaps)


def _simulate_thermal(params: Thermal, cfg: SimConfig) -> np.ndarray:
    # amplitude correlation decays at 2*gamma (so the intensity
    # correlation carries exp(-4 gamma tau)), intensity 2 gamma |alpha|^2
    gamma, nbar = params.gamma, params.nbar
    rng, rng_ev = _streams(cfg.seed, 2)
    dt = cfg.dt_factor / (2.0 * gamma)
    rho = math.exp(-2.0 * gamma * dt)
    sig = math.sqrt(0.5 * nbar * (1.0 - rho * rho))  # per quadrature
    # stationary start
    a_re = rng.normal(scale=math.sqrt(0.5 * nbar))
    a_im = rng.normal(scale=math.sqrt(0.5 * nbar))
    chunk = 1 << 23
    target = cfg.n_events
    times = []
    t0 = 0.0
    collected = 0
    while collected < target:
        nre = rng.normal(size=chunk)
        nim = rng.normal(size=chunk)
        intens, a_re, a_im = _kernels.ou_intensity(nre, nim, rho, sig, a_re, a_im)
        intens *= 2.0 * gamma
        csum = np.concatenate(([0.0], np.cumsum(intens) * dt))
        lam = csum[-1]
        n_ev = rng_ev.poisson(lam)
        if n_ev:
            u = np.sort(rng_ev.uniform(0.0, lam, size=n_ev))
            edges = np.arange(chunk + 1) * dt
            tt = t0 + np.interp(u, csum, edges)
            times.append(tt)
            collected += n_ev
        t0 += chunk * dt
    out = np.concatenate(times)[:target]
    return _dedupe(out)


def _dedupe(t: np.ndarray) -> np.ndarray:
    # coincident placements are measure-zero but float grids can collide
    keep = np.concatenate(([True], np.diff(t) > 0))
    return t[keep]


def dpo_fock_cutoff(nbar: float, tail: float = 1e-10) -> int:
    """Photon-number cutoff from the geometric tail of the steady state."""
    r = math.sqrt(2.0 * nbar / (1.0 + 2.0 * nbar))
    m = 0.5 * r / (1.0 - r * r)
    nplus = nbar + m
    q = nplus / (1.0 + nplus)
    n = int(math.ceil(math.log(tail) / math.log(q))) if q > 0 else 4
    return max(n, 8)


def _dpo_generator(params: Dpo, ncut: int) -> np.ndarray:
    """No-count generator K = (kappa eps/2)(adag^2 - a^2) - gamma adag a."""
    gamma = params.gamma
    keps = gamma * params.pump_ratio
    n = np.arange(ncut)
    k = np.zeros((ncut, ncut))
    k[n, n] = -gamma * n
    for i in range(ncut - 2):
        amp = 0.5 * keps * math.sqrt((i + 1) * (i + 2))
        k[i + 2, i] = amp  # adag^2
        k[i, i + 2] = -amp  # -a^2
    return k


@dataclass
class _JumpSystem:
    """Diagonalized no-count evolution for quantum-jump sampling."""

    eigs: np.ndarray  # lambda_i
    v: np.ndarray
    vinv: np.ndarray
    gram: np.ndarray  # V^dag V
    jump: np.ndarray  # jump operator in the same basis

    @classmethod
    def build(cls, kmat: np.ndarray, jump: np.ndarray) -> "_JumpSystem":
        eigs, v = np.linalg.eig(kmat)
        vinv = np.linalg.inv(v)
        return cls(eigs=eigs, v=v, vinv=vinv, gram=v.conj().T @ v, jump=jump)

    def survival_terms(self, psi: np.ndarray):
        """m(t) = sum_k Re(w_k e^{mu_k t}) for the normalized state psi."""
        c = self.vinv @ psi
        w = self.gram * np.outer(c.conj(), c)
        mu = self.eigs.conj()[:, None] + self.eigs[None, :]
        w = w.ravel()
        mu = mu.ravel()
        keep = np.abs(w) > 1e-14
        return w[keep], mu[keep]

    def propagate(self, psi: np.ndarray, t: float) -> np.ndarray:
        out = self.v @ (np.exp(self.eigs * t) * (self.vinv @ psi))
        return out / np.linalg.norm(out)


def _sample_jump_waits(system: _JumpSystem, psi0: np.ndarray, n_events: int,
                       rng) -> np.ndarray:
    psi = psi0 / np.linalg.norm(psi0)
    us = rng.uniform(size=n_events)
    waits = np.empty(n_events)
    for i in range(n_events):
        w, mu = system.survival_terms(psi)
        t = _kernels.expsum_solve(w, mu, us[i])
        psi = system.propagate(psi, t)
        psi = system.jump @ psi
        psi /= np.linalg.norm(psi)
        waits[i] = t
    return waits


def _simulate_dpo(params: Dpo, cfg: SimConfig) -> np.ndarray:
    ncut = cfg.fock_cutoff or dpo_fock_cutoff(params.nbar)
    kmat = _dpo_generator(params, ncut)
    jump = np.zeros((ncut, ncut))
    idx = np.arange(ncut - 1)
    jump[idx, idx + 1] = np.sqrt(2.0 * params.gamma * (idx + 1))
    system = _JumpSystem.build(kmat.astype(complex), jump.astype(complex))
    (rng,) = _streams(cfg.seed, 1)
    psi0 = np.zeros(ncut, dtype=complex)
    psi0[0] = 1.0
    waits = _sample_jump_waits(system, psi0, cfg.n_events + _BURN_IN, rng)
    return np.cumsum(waits[_BURN_IN:])


def _rf_survival(params: Rf, t: np.ndarray):
    """No-count survival from the ground state and its derivative.

    With K = -beta/2 + N, N^2 = (beta^2 - rabi^2)/4, the propagator is
    e^{-beta t/2} (C(d t^2) + t N S(d t^2)) with the entire cosh/sinhc
    pair, which is regular straight through the critically damped point
    rabi = beta where K is defective and eigendecomposition fails.
    """
    beta, rabi = params.beta, params.rabi
    d = 0.25 * (beta**2 - rabi**2)
    x = d * t * t
    c = np.vectorize(entire_cosh)(x)
    s = np.vectorize(entire_sinhc)(x)
    env = np.exp(-beta * t)
    pe = 0.25 * rabi**2 * t * t * s * s  # excited-state population / env
    m = env * (pe + (c + 0.5 * beta * t * s) ** 2)
    dm = -2.0 * beta * env * pe
    return m, dm


def _simulate_rf(params: Rf, cfg: SimConfig) -> np.ndarray:
    """RF waits are iid (each jump resets the atom to the ground state),
    so the record is an inverse-transform renewal process."""
    (rng,) = _streams(cfg.seed, 1)
    us = rng.uniform(size=cfg.n_events)
    # initial guess by inverting a dense monotone table, then Newton
    hi = 2.0
    while _rf_survival(params, np.array([hi]))[0][0] > us.min():
        hi *= 2.0
    grid = np.linspace(0.0, hi, 4096)
    mg, _ = _rf_survival(params, grid)
    t = np.interp(us, mg[::-1], grid[::-1])
    for _ in range(60):
        m, dm = _rf_survival(params, t)
        step = (m - us) / dm
        step = np.clip(step, -hi / 64.0, hi / 64.0)
        t = np.maximum(t - step, 0.0)
        if np.max(np.abs(step)) < 1e-12 * hi:
            break
    return np.cumsum(waits_checked(t, params, us))


def waits_checked(t: np.ndarray, params: Rf, us: np.ndarray) -> np.ndarray:
    m, _ = _rf_survival(params, t)
    bad = np.abs(m - us) > 1e-8
    if np.any(bad):  # pragma: no cover - Newton safeguard
        from scipy.optimize import brentq

        for i in np.nonzero(bad)[0]:
            f = lambda tt: _rf_survival(params, np.array([tt]))[0][0] - us[i]
            hi = 1.0
            while f(hi) > 0:
                hi *= 2.0
            t[i] = brentq(f, 0.0, hi, xtol=1e-13)
    return t


def simulate(params: SourceParams, det: Detector, cfg: SimConfig) -> EventRecord:
    """Generate a detection record with cfg.n_events events at efficiency
    det.eta (thinned from a longer unit-efficiency record if eta < 1)."""
    if det.eta < 1.0:
        raw_n = int(math.ceil(cfg.n_events / det.eta * 1.05)) + 1000
        raw = simulate(params, Detector(1.0), SimConfig(
            n_events=raw_n, seed=cfg.seed, fock_cutoff=cfg.fock_cutoff,
            dt_factor=cfg.dt_factor))
        rec = thin(raw, det.eta, seed=cfg.seed + 1)
        if len(rec) < cfg.n_events:  # pragma: no cover - 1.05 margin ample
            raise RuntimeError("thinning produced too few events")
        return EventRecord(rec.times[: cfg.n_events], dict(rec.meta))
    if isinstance(params, Coherent):
        times = _simulate_coherent(params, cfg)
    elif isinstance(params, Thermal):
        times = _simulate_thermal(params, cfg)
    elif isinstance(params, Dpo):
        times = _simulate_dpo(params, cfg)
    elif isinstance(params, Rf):
        times = _simulate_rf(params, cfg)
    else:
        raise TypeError(f"unknown source params: {params!r}")
    meta = {
        "source": type(params).__name__.lower(),
        "params": {k: getattr(params, k) for k in params.__dataclass_fields__},
        "eta": det.eta,
        "seed": cfg.seed,
        "n_events": int(times.size),
    }
    return EventRecord(times, meta)


def thin(record: EventRecord, eta: float, seed: int) -> EventRecord:
    """Bernoulli thinning: keep each event independently with prob eta."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")
    (rng,) = _streams(seed, 1)
    keep = rng.uniform(size=len(record)) < eta
    meta = dict(record.meta)
    meta["eta"] = eta * meta.get("eta", 1.0)
    meta["thinned_from"] = len(record)
    return EventRecord(record.times[keep], meta)


# -------------------------------------------------------------------------
# estimators
# -------------------------------------------------------------------------


def _hist_density(samples: np.ndarray, edges: np.ndarray, n_batches: int = 64):
    """Histogram density with batch-means standard errors.

    Sequential batches keep serial correlation (bunched sources produce
    correlated gaps) inside batches, so the across-batch scatter is an
    honest error bar; for independent samples it reduces to the Poisson
    one.
    """
    widths = np.diff(edges)
    nb = max(min(n_batches, samples.size // 50), 2)
    cut = (samples.size // nb) * nb
    parts = samples[:cut].reshape(nb, -1)
    dens_b = np.stack([
        np.histogram(p, bins=edges)[0] / (p.shape[0] * widths) for p in parts
    ])
    dens = dens_b.mean(axis=0)
    stderr = dens_b.std(axis=0, ddof=1) / math.sqrt(nb)
    counts, _ = np.histogram(samples, bins=edges)
    floor = np.sqrt(np.maximum(counts, 1.0)) / (samples.size * widths)
    return dens, np.maximum(stderr, floor)


def estimate_wn(record: EventRecord, n: int, edges: np.ndarray):
    """Empirical w_n from non-overlapping n-event gaps (independent for
    renewal sources, serially correlated otherwise)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    t = record.times
    samples = t[n::n] - t[: t.size - n : n]
    return _hist_density(samples, np.asarray(edges, dtype=float))


def estimate_pn(record: EventRecord, n: int, edges: np.ndarray, n_starts: int,
                seed: int):
    """Empirical P_n by Palm-style sampling: uniform start times, wait for
    the n-th subsequent event."""
    if n < 1:
        raise ValueError("n must be >= 1")
    t = record.times
    (rng,) = _streams(seed, 1)
    # leave headroom so the n-th event after the start always exists
    horizon = t[-max(10 * n, 100)]
    starts = np.sort(rng.uniform(0.0, horizon, size=n_starts))
    idx = np.searchsorted(t, starts, side="right") + (n - 1)
    ok = idx < t.size
    samples = t[idx[ok]] - starts[ok]
    return _hist_density(samples, np.asarray(edges, dtype=float))


def estimate_photocount(record: EventRecord, window: float, nmax: int):
    """p(n, T) from disjoint windows of length T tiling the record."""
    t = record.times
    nwin = int(t[-1] // window)
    counts = np.diff(np.searchsorted(t, np.arange(nwin + 1) * window))
    probs = np.bincount(np.minimum(counts, nmax + 1), minlength=nmax + 2)
    probs = probs[: nmax + 1] / nwin
    stderr = np.sqrt(np.maximum(probs * (1 - probs), 1.0 / nwin) / nwin)
    return probs, stderr


def estimate_wait_moments(record: EventRecord, n: int):
    """Mean/variance of the n-gap with standard errors; the variance
    stderr uses the fourth central moment."""
    t = record.times
    samples = t[n::n] - t[: t.size - n : n]
    m = samples.mean()
    var = samples.var(ddof=1)
    nn = samples.size
    m4 = np.mean((samples - m) ** 4)
    se_mean = math.sqrt(var / nn)
    se_var = math.sqrt(max(m4 - var**2, 0.0) / nn)
    return (m, se_mean), (var, se_var)


def poisson_excess(record: EventRecord, n: int = 1, n_batches: int = 64):
    """Wait-variance excess D = Var[T_n] - Mean[T_n]^2 / n over a Poisson
    process of the same rate, with a batch-means standard error.
    D > 0 is super-Poissonian (bunched), D < 0 sub-Poissonian.
    """
    t = record.times
    samples = t[n::n] - t[: t.size - n : n]
    nb = max(min(n_batches, samples.size // 100), 2)
    cut = (samples.size // nb) * nb
    parts = samples[:cut].reshape(nb, -1)
    # Poisson reference: gaps of a rate-r Poisson process have
    # variance n/r^2 = mean^2/n
    dvals = parts.var(axis=1, ddof=1) - parts.mean(axis=1) ** 2 / n
    d = float(dvals.mean())
    se = float(dvals.std(ddof=1) / math.sqrt(nb))
    return d, se
