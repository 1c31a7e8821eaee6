"""Pure-numpy reference implementations of the compiled kernels."""

import numpy as np
import scipy.signal


def ou_intensity(noise_re, noise_im, rho, sig, a_re0, a_im0):
    """Exact AR(1) update of a complex OU amplitude; returns |alpha|^2 at
    each step plus the final amplitude for chunk carry-over.

    alpha_{k+1} = rho * alpha_k + sig * xi_k, applied per quadrature.
    """
    b = np.array([sig])
    a = np.array([1.0, -rho])
    re, zf_re = scipy.signal.lfilter(b, a, noise_re, zi=np.array([rho * a_re0]))
    im, zf_im = scipy.signal.lfilter(b, a, noise_im, zi=np.array([rho * a_im0]))
    return re * re + im * im, float(re[-1]), float(im[-1])


def expsum_solve(w, mu, u, tol=1e-13):
    """Solve m(t) = sum_k Re(w_k exp(mu_k t)) = u for t >= 0.

    m is a survival probability: m(0) = 1 and m decreases monotonically
    to 0, so a doubling bracket plus bisection-with-Newton-polish is
    globally safe.
    """
    w = np.asarray(w)
    mu = np.asarray(mu)

    def m(t):
        return np.sum((w * np.exp(mu * t)).real)

    def dm(t):
        return np.sum((w * mu * np.exp(mu * t)).real)

    # bracket: double until m(hi) < u
    hi = -1.0 / max(np.max(mu.real), -1e300)
    if not np.isfinite(hi) or hi <= 0:
        hi = 1.0
    while m(hi) > u:
        hi *= 2.0
        if hi > 1e300:  # pragma: no cover - defensive
            return hi
    lo = 0.0
    t = 0.5 * hi
    for _ in range(200):
        f = m(t) - u
        if f > 0:
            lo = t
        else:
            hi = t
        d = dm(t)
        tn = t - f / d if d < 0 else lo
        if not (lo < tn < hi):
            tn = 0.5 * (lo + hi)
        if abs(tn - t) <= tol * max(tn, 1.0):
            return tn
        t = tn
    return t
