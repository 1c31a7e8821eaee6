"""Source parameters, detector model and shared numeric helpers.

Rates are raw reciprocal-time values in whatever unit the caller picks;
everything downstream only ever forms dimensionless products such as
``gamma * T`` or ``eta * flux * T``, so no canonical unit is imposed.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

__all__ = [
    "Coherent",
    "Thermal",
    "Dpo",
    "Rf",
    "SourceParams",
    "Detector",
    "DistKind",
    "DistRequest",
    "Curve",
    "MomentSummary",
    "mean_flux",
    "scale_params",
    "entire_cosh",
    "entire_sinhc",
    "entire_coshm1x",
    "clamp_density",
    "NegativeDensityError",
]

# Clamp-and-warn policy: round-off negatives below this fraction of the
# peak are zeroed, anything larger is a real numerical failure.
CLAMP_TOL = 1e-9


class NegativeDensityError(ValueError):
    """A computed density went negative beyond round-off tolerance."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class Coherent:
    """Constant-flux (Poisson) light with mean photon flux per unit time."""

    flux: float

    def __post_init__(self) -> None:
        _require(self.flux > 0, "flux must be > 0")


@dataclass(frozen=True)
class Thermal:
    """Laser below threshold: cavity field decay rate gamma, occupation nbar."""

    gamma: float
    nbar: float

    def __post_init__(self) -> None:
        _require(self.gamma > 0, "gamma must be > 0")
        _require(self.nbar >= 0, "nbar must be >= 0")


@dataclass(frozen=True)
class Dpo:
    """Degenerate parametric oscillator below threshold."""

    gamma: float
    nbar: float

    def __post_init__(self) -> None:
        _require(self.gamma > 0, "gamma must be > 0")
        _require(self.nbar >= 0, "nbar must be >= 0")

    @property
    def pump_ratio(self) -> float:
        """r = |kappa eps| / gamma; below threshold means r < 1."""
        return math.sqrt(2.0 * self.nbar / (1.0 + 2.0 * self.nbar))

    @property
    def lambda1(self) -> float:
        return self.gamma * (1.0 - self.pump_ratio)

    @property
    def lambda2(self) -> float:
        return self.gamma * (1.0 + self.pump_ratio)


@dataclass(frozen=True)
class Rf:
    """Resonantly driven two-level atom (beta = half the Einstein-A rate)."""

    beta: float
    rabi: float

    def __post_init__(self) -> None:
        _require(self.beta > 0, "beta must be > 0")
        _require(self.rabi >= 0, "rabi must be >= 0")

    @property
    def omega2(self) -> float:
        """omega^2 = beta^2 - rabi^2 (may be negative)."""
        return self.beta**2 - self.rabi**2

    @property
    def steady_flux(self) -> float:
        b2, o2 = self.beta**2, self.rabi**2
        return self.beta * o2 / (o2 + 2.0 * b2)


SourceParams = Union[Coherent, Thermal, Dpo, Rf]


@dataclass(frozen=True)
class Detector:
    """Photodetector with quantum efficiency eta in (0, 1]."""

    eta: float = 1.0

    def __post_init__(self) -> None:
        _require(0.0 < self.eta <= 1.0, "eta must be in (0, 1]")

    @property
    def mu(self) -> float:
        """(1 - eta)^(1/3), used by the non-unit-efficiency RF formulas."""
        return (1.0 - self.eta) ** (1.0 / 3.0)


class DistKind(str, Enum):
    PHOTOCOUNT = "p"
    UNCONDITIONAL_WAIT = "P"
    CONDITIONAL_WAIT = "w"


@dataclass(frozen=True)
class DistRequest:
    kind: DistKind
    n: int
    engine: str = "exact"

    def __post_init__(self) -> None:
        if self.kind is DistKind.PHOTOCOUNT:
            _require(self.n >= 0, "photocount order must be >= 0")
        else:
            _require(self.n >= 1, "wait-time order must be >= 1")


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float


@dataclass(frozen=True)
class Curve:
    """A sampled distribution with provenance metadata."""

    grid: np.ndarray
    values: np.ndarray
    stderr: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        _require(grid.ndim == 1, "grid must be 1-d")
        _require(grid.shape == values.shape, "grid and values must match")
        _require(bool(np.all(np.diff(grid) > 0)), "grid must be strictly ascending")
        if self.stderr is not None:
            stderr = np.asarray(self.stderr, dtype=float)
            object.__setattr__(self, "stderr", stderr)
            _require(stderr.shape == values.shape, "stderr and values must match")
        _require(bool(np.all(values >= 0)), "values must be nonnegative")

    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.meta, sort_keys=True, default=str).encode()
        ).hexdigest()[:16]


def clamp_density(values: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    """Zero out tiny negative round-off; raise if negatives are too large."""
    values = np.asarray(values, dtype=float)
    peak = float(np.max(values, initial=0.0))
    floor = -tol * max(peak, 1e-300)
    worst = float(np.min(values, initial=0.0))
    if worst < floor:
        raise NegativeDensityError(
            f"negative density {worst:.3e} exceeds clamp tolerance "
            f"{floor:.3e} (peak {peak:.3e})"
        )
    return np.where(values < 0.0, 0.0, values)


def mean_flux(params: SourceParams) -> float:
    """Mean photon flux of the source (before detection efficiency)."""
    if isinstance(params, Coherent):
        return params.flux
    if isinstance(params, (Thermal, Dpo)):
        return 2.0 * params.gamma * params.nbar
    if isinstance(params, Rf):
        return params.steady_flux
    raise TypeError(f"unknown source params: {params!r}")


def scale_params(params: SourceParams, c: float) -> SourceParams:
    """Rescale the time unit: every rate is multiplied by c."""
    _require(c > 0, "scale factor must be > 0")
    if isinstance(params, Coherent):
        return Coherent(flux=c * params.flux)
    if isinstance(params, Thermal):
        return Thermal(gamma=c * params.gamma, nbar=params.nbar)
    if isinstance(params, Dpo):
        return Dpo(gamma=c * params.gamma, nbar=params.nbar)
    if isinstance(params, Rf):
        return Rf(beta=c * params.beta, rabi=c * params.rabi)
    raise TypeError(f"unknown source params: {params!r}")


# --- entire hyperbolic helpers -------------------------------------------
#
# C(x) = sum x^k/(2k)!  = cosh(sqrt x)        (x >= 0)
#                       = cos(sqrt -x)        (x < 0)
# S(x) = sum x^k/(2k+1)! = sinh(sqrt x)/sqrt x resp. sin(sqrt -x)/sqrt -x
#
# Both are entire in x, which removes every square-root branch decision:
# thermal z^2, DPO z_i^2 and RF omega^2 only ever enter through them.

_SERIES_SWITCH = 0.25
_SERIES_TERMS = 12


def entire_cosh(x: float) -> float:
    if abs(x) <= _SERIES_SWITCH:
        acc = 0.0
        term = 1.0
        for k in range(_SERIES_TERMS):
            acc += term
            term *= x / ((2 * k + 1) * (2 * k + 2))
        return acc
    if x > 0:
        return math.cosh(math.sqrt(x))
    return math.cos(math.sqrt(-x))


def entire_sinhc(x: float) -> float:
    if abs(x) <= _SERIES_SWITCH:
        acc = 0.0
        term = 1.0
        for k in range(_SERIES_TERMS):
            acc += term
            term *= x / ((2 * k + 2) * (2 * k + 3))
        return acc
    if x > 0:
        r = math.sqrt(x)
        return math.sinh(r) / r
    r = math.sqrt(-x)
    return math.sin(r) / r


def entire_coshm1x(x: float) -> float:
    """(C(x) - 1)/x = sum x^k/(2k+2)!, entire; appears in the RF w3 bracket."""
    if abs(x) <= _SERIES_SWITCH:
        acc = 0.0
        term = 0.5
        for k in range(_SERIES_TERMS):
            acc += term
            term *= x / ((2 * k + 3) * (2 * k + 4))
        return acc
    return (entire_cosh(x) - 1.0) / x
