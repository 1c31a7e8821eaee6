"""photonwait: photo-detection counting and wait-time statistics.

Three engines for the same quantities -- generating-function jet
differentiation (exact), analytic formulas (closed), and stochastic
detection records (mc) -- for coherent, thermal, degenerate
parametric-oscillator, and resonance-fluorescence light at arbitrary
detector efficiency.
"""

from ._kernels import BACKEND as kernel_backend
from .exact import (
    g_zero,
    photocount,
    photocount_dist,
    pn_wait,
    sample_curve,
    wn_via_pn,
    wn_wait,
)
from .mcsim import (
    EventRecord,
    SimConfig,
    estimate_photocount,
    estimate_pn,
    estimate_wait_moments,
    estimate_wn,
    poisson_excess,
    simulate,
    thin,
)
from .model import (
    Coherent,
    Curve,
    Detector,
    DistKind,
    DistRequest,
    Dpo,
    MomentSummary,
    Rf,
    SourceParams,
    Thermal,
    mean_flux,
)

__version__ = "0.1.0"

__all__ = [
    "Coherent",
    "Thermal",
    "Dpo",
    "Rf",
    "Detector",
    "DistKind",
    "DistRequest",
    "Curve",
    "MomentSummary",
    "SourceParams",
    "mean_flux",
    "photocount",
    "photocount_dist",
    "pn_wait",
    "wn_wait",
    "wn_via_pn",
    "g_zero",
    "sample_curve",
    "EventRecord",
    "SimConfig",
    "simulate",
    "thin",
    "estimate_wn",
    "estimate_pn",
    "estimate_photocount",
    "estimate_wait_moments",
    "poisson_excess",
    "kernel_backend",
    "__version__",
]
