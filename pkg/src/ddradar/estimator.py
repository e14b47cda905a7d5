"""Coarse threshold detection and fractional refinement.

Detection lists every surface cell above the threshold, thinned by
non-maximum suppression over one main-lobe extent so each target yields a
single hit.  Refinement then recovers the sub-cell offsets, either by
least-squares fitting the separable sinc lobe model to the magnitude patch
around the peak (``sinc2d``) or by closed-form parabolic interpolation of
the two 3-point stencils through the peak (``quadratic``).

The sinc fit eliminates the amplitude in closed form: for fixed offsets the
optimal gain is alpha = max(0, sum(y m) / sum(m^2)), leaving a 2-variable
bounded quasi-Newton descent over [-1/2, 1/2]^2 seeded with the quadratic
estimate.  When the seed is already first-order stationary the descent is
skipped: on a target sitting exactly on the grid the magnitude patch is
centro-symmetric, the origin is a stationary point of the fit, and walking
downhill from it would only chase the small code-dependent mismatch between
the real surface and the lobe model.  The patch is normalized by its peak
before fitting, so rescaling the surface scales the fitted amplitude and
leaves the recovered offsets unchanged up to solver round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .ambiguity import (
    AmbiguitySurface,
    SincLobeModel,
    discrete_ambiguity,
    extend_surface,
)
from .config import RadarParams
from .waveform import ComplexSignal

DEFAULT_THRESHOLD = 0.5
METHODS = ("sinc2d", "quadratic")
_FIT_BOUNDS = ((-0.5, 0.5), (-0.5, 0.5))
_INIT_GRAD_TOL = 1e-3
_FD_STEP = 1e-6


@dataclass(frozen=True)
class Detection:
    """A coarse peak: integer lag, signed Doppler bin, normalized magnitude."""

    l_hat: int
    k_hat: int
    peak_mag: float


@dataclass(frozen=True)
class Estimate:
    """A refined detection with fractional offsets and fitted amplitude."""

    detection: Detection
    eps_t: float
    eps_f: float
    alpha: float
    method: str
    delay_est: float  # (l_hat + eps_t) * T_s, seconds
    doppler_est: float  # (k_hat + eps_f) * delta_f, Hz
    converged: bool = True
    degenerate: bool = False

    @property
    def delay_cells(self) -> float:
        return self.detection.l_hat + self.eps_t

    @property
    def doppler_cells(self) -> float:
        return self.detection.k_hat + self.eps_f


def _make_estimate(
    det: Detection,
    eps_t: float,
    eps_f: float,
    alpha: float,
    method: str,
    params: RadarParams,
    converged: bool = True,
    degenerate: bool = False,
) -> Estimate:
    eps_t = min(0.5, max(-0.5, float(eps_t)))
    eps_f = min(0.5, max(-0.5, float(eps_f)))
    return Estimate(
        detection=det,
        eps_t=eps_t,
        eps_f=eps_f,
        alpha=max(0.0, float(alpha)),
        method=method,
        delay_est=(det.l_hat + eps_t) * params.T_s,
        doppler_est=(det.k_hat + eps_f) * params.delta_f,
        converged=converged,
        degenerate=degenerate,
    )


def coarse_detect(
    surface: AmbiguitySurface, theta: float, params: RadarParams
) -> list[Detection]:
    """All cells with |A| > theta, one survivor per main lobe.

    Suppression covers a (floor(M/N_f), floor(N/N_t)) half-extent
    neighborhood, circular along the Doppler axis.  Returns detections in
    descending magnitude order; an empty list means nothing crossed theta.
    """
    if theta <= 0:
        raise ValueError(f"threshold must be positive, got {theta}")
    mag = np.abs(surface.values)
    rows, cols = np.nonzero(mag > theta)
    if rows.size == 0:
        return []
    order = np.argsort(mag[rows, cols])[::-1]
    rows, cols = rows[order], cols[order]
    r_ell, r_k = params.M // params.N_f, params.N // params.N_t
    nbins = surface.n_bins
    kept: list[tuple[int, int, float]] = []
    for row, col in zip(rows, cols):
        suppressed = False
        for krow, kcol, _ in kept:
            d_k = abs(col - kcol)
            d_k = min(d_k, nbins - d_k)
            if abs(row - krow) <= r_ell and d_k <= r_k:
                suppressed = True
                break
        if not suppressed:
            kept.append((row, col, float(mag[row, col])))
    return [
        Detection(int(surface.ell_min + row), int(surface.signed_bin(col)), peak)
        for row, col, peak in kept
    ]


def _stencil_offset(minus: float, center: float, plus: float) -> tuple[float, bool]:
    """Parabolic peak offset from three magnitudes; (0, True) when degenerate."""
    denom = 4.0 * center - 2.0 * plus - 2.0 * minus
    if denom <= 0.0:
        return 0.0, True
    return (plus - minus) / denom, False


def refine_quadratic(surface: AmbiguitySurface, det: Detection) -> Estimate:
    """Closed-form fractional offsets from the five-point stencil at the peak."""
    if not (surface.contains_lag(det.l_hat - 1) and surface.contains_lag(det.l_hat + 1)):
        raise ValueError(
            f"stencil lags {det.l_hat}+-1 outside surface "
            f"[{surface.ell_min}, {surface.ell_max}]"
        )
    values = surface.values
    row = det.l_hat - surface.ell_min
    col = det.k_hat % surface.n_bins
    col_lo = (col - 1) % surface.n_bins
    col_hi = (col + 1) % surface.n_bins
    center = abs(values[row, col])
    eps_t, degen_t = _stencil_offset(
        abs(values[row - 1, col]), center, abs(values[row + 1, col])
    )
    eps_f, degen_f = _stencil_offset(
        abs(values[row, col_lo]), center, abs(values[row, col_hi])
    )
    return _make_estimate(
        det,
        eps_t,
        eps_f,
        center,
        "quadratic",
        surface.params,
        degenerate=degen_t or degen_f,
    )


def _fit_patch(
    surface: AmbiguitySurface, det: Detection
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Magnitude patch and its (lag, bin) offsets around a detection."""
    params = surface.params
    r_ell, r_k = params.M // params.N_f, params.N // params.N_t
    ell_off = np.array(
        [
            d
            for d in range(-r_ell, r_ell + 1)
            if surface.contains_lag(det.l_hat + d)
        ]
    )
    k_off = np.arange(-r_k, r_k + 1)
    rows = (det.l_hat + ell_off) - surface.ell_min
    cols = (det.k_hat + k_off) % surface.n_bins
    patch = np.abs(surface.values[np.ix_(rows, cols)])
    return patch, ell_off, k_off


def _fd_gradient(fun, x: np.ndarray, h: float = _FD_STEP) -> np.ndarray:
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * h)
    return g


def refine_sinc2d(
    surface: AmbiguitySurface, det: Detection, params: RadarParams
) -> Estimate:
    """Least-squares fit of the sinc lobe model over the main-lobe patch."""
    patch, ell_off, k_off = _fit_patch(surface, det)
    peak = float(patch.max())
    y = patch / peak
    model = SincLobeModel(params)

    def projected_gain(m):
        return max(0.0, float(np.sum(y * m) / np.sum(m * m)))

    def objective(x):
        m = model(ell_off[:, None] - x[0], k_off[None, :] - x[1])
        return float(np.sum((y - projected_gain(m) * m) ** 2))

    try:
        quad = refine_quadratic(surface, det)
        x0 = np.array([quad.eps_t, quad.eps_f])
    except ValueError:  # stencil clipped at the surface edge
        x0 = np.zeros(2)

    converged = True
    if np.max(np.abs(_fd_gradient(objective, x0))) <= _INIT_GRAD_TOL:
        best = x0  # seed already stationary
    else:
        result = minimize(
            objective,
            x0,
            method="L-BFGS-B",
            bounds=_FIT_BOUNDS,
            options={"ftol": 1e-14, "gtol": 1e-12, "maxiter": 200},
        )
        best = np.asarray(result.x)
        converged = bool(result.success)
    # never worse than the seed or than leaving the offsets at zero
    candidates = [np.zeros(2), x0, best]
    eps = min(candidates, key=objective)
    m = model(ell_off[:, None] - eps[0], k_off[None, :] - eps[1])
    return _make_estimate(
        det,
        eps[0],
        eps[1],
        projected_gain(m) * peak,
        "sinc2d",
        params,
        converged=converged,
    )


def _refine(
    method: str, surface: AmbiguitySurface, det: Detection, params: RadarParams
) -> Estimate:
    if method == "sinc2d":
        return refine_sinc2d(surface, det, params)
    if method == "quadratic":
        return refine_quadratic(surface, det)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def _refinement_extent(method: str, params: RadarParams) -> int:
    return params.M // params.N_f if method == "sinc2d" else 1


def estimate(
    r: ComplexSignal,
    s: ComplexSignal,
    theta: float,
    method: str,
    params: RadarParams,
    lag_window: tuple[int, int] | None = None,
) -> list[Estimate]:
    """Full pipeline: ambiguity surface, threshold detection, refinement.

    The surface is normalized by the replica energy so ``theta`` is read
    against a unit-peak auto-ambiguity.  The lag window defaults to the
    detectability window and is extended on demand when a refinement patch
    would cross its edge.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    window = params.lag_window if lag_window is None else lag_window
    surface = discrete_ambiguity(r, s, window, params).normalized(s.energy)
    detections = coarse_detect(surface, theta, params)
    if not detections:
        return []
    ext = _refinement_extent(method, params)
    lo = min(d.l_hat for d in detections) - ext
    hi = max(d.l_hat for d in detections) + ext
    max_lag = params.frame_len - 1
    surface = extend_surface(surface, r, s, max(lo, -max_lag), min(hi, max_lag))
    return [_refine(method, surface, det, params) for det in detections]
