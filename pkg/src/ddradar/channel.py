"""Single-target channel: fractional delay, Doppler shift, attenuation, noise.

The main path samples the analytic transmitted pulse train directly,

    r[j] = alpha * s(j T_s - t_d) * e^{+2 pi i f_D j T_s},

with s the windowed pulse train the transmitter actually radiates, so an
integer-sample delay reduces to an exact shift of the stored replica.  An
ideal-bandlimited interpolation matrix H is provided as an independent
oracle: it models DA conversion -> delay/Doppler -> AD conversion with
ideal sinc filters and agrees with the direct path at the 1e-3
relative-energy level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import CodeMatrix
from .config import RadarParams
from .waveform import ComplexSignal, evaluate_transmitted


@dataclass(frozen=True)
class ChannelTruth:
    """Ground-truth delay t_d (s), Doppler f_D (Hz), complex gain alpha,
    plus the grid decomposition t_d = (l_d + eps_t) T_s, f_D = (k_D + eps_f) delta_f.

    Rounding to the nearest grid cell breaks ties toward even integers, so
    |eps_t|, |eps_f| <= 1/2 always.
    """

    t_d: float
    f_D: float
    alpha: complex
    l_d: int
    eps_t: float
    k_D: int
    eps_f: float

    def __post_init__(self):
        if abs(self.eps_t) > 0.5 + 1e-12 or abs(self.eps_f) > 0.5 + 1e-12:
            raise ValueError(
                f"fractional parts must lie in [-1/2, 1/2], got "
                f"eps_t={self.eps_t}, eps_f={self.eps_f}"
            )

    @classmethod
    def from_delay_doppler(
        cls, t_d: float, f_D: float, alpha: complex, params: RadarParams
    ) -> "ChannelTruth":
        l_d = int(np.rint(t_d / params.T_s))  # round-half-even
        k_D = int(np.rint(f_D / params.delta_f))
        return cls(
            t_d=t_d,
            f_D=f_D,
            alpha=alpha,
            l_d=l_d,
            eps_t=t_d / params.T_s - l_d,
            k_D=k_D,
            eps_f=f_D / params.delta_f - k_D,
        )

    @classmethod
    def from_grid(
        cls,
        l_d: int,
        eps_t: float,
        k_D: int,
        eps_f: float,
        alpha: complex,
        params: RadarParams,
    ) -> "ChannelTruth":
        return cls(
            t_d=(l_d + eps_t) * params.T_s,
            f_D=(k_D + eps_f) * params.delta_f,
            alpha=alpha,
            l_d=l_d,
            eps_t=eps_t,
            k_D=k_D,
            eps_f=eps_f,
        )

    def in_window(self, params: RadarParams) -> bool:
        """True when the delay falls in the monostatic detectability window."""
        return params.N_t * params.T_c <= self.t_d <= (params.N - params.N_t) * params.T_c


def apply_channel(
    code: CodeMatrix, params: RadarParams, truth: ChannelTruth
) -> ComplexSignal:
    """Noiseless received frame for a single target."""
    if not truth.in_window(params):
        raise ValueError(
            f"delay t_d={truth.t_d} outside detectability window "
            f"[{params.N_t * params.T_c}, {(params.N - params.N_t) * params.T_c}]"
        )
    t = np.arange(params.frame_len) * params.T_s
    echo = evaluate_transmitted(code, params, t - truth.t_d)
    r = truth.alpha * echo * np.exp(2j * np.pi * truth.f_D * t)
    return ComplexSignal(r, params.T_s)


def h_matrix(
    truth: ChannelTruth, params: RadarParams, n_rows: int, n_cols: int
) -> np.ndarray:
    """Ideal-sinc interpolation channel matrix H of shape (n_rows, n_cols).

    H[i, j] = T_s a e^{i pi f_D (t_d + (i+j) T_s)} sinc(a (t_d + (j-i) T_s)),
    a = max(0, 1/T_s - |f_D|), with the normalized sinc(x) = sin(pi x)/(pi x).
    """
    a = max(0.0, 1.0 / params.T_s - abs(truth.f_D))
    if a == 0.0:
        return np.zeros((n_rows, n_cols), dtype=np.complex128)
    i = np.arange(n_rows)[:, None]
    j = np.arange(n_cols)[None, :]
    phase = np.exp(1j * np.pi * truth.f_D * (truth.t_d + (i + j) * params.T_s))
    lobe = np.sinc(a * (truth.t_d + (j - i) * params.T_s))
    return params.T_s * a * phase * lobe


def h_matrix_entry(i: int, j: int, truth: ChannelTruth, params: RadarParams) -> complex:
    """Single entry of the ideal-sinc channel matrix."""
    return complex(h_matrix(truth, params, i + 1, j + 1)[i, j])


def h_matrix_received(
    signal: ComplexSignal, truth: ChannelTruth, params: RadarParams
) -> ComplexSignal:
    """Oracle received frame r[i] = sum_{j<L} H[i, j] s[j] (no noise)."""
    H = h_matrix(truth, params, params.frame_len, params.L)
    r = truth.alpha * (H @ signal.samples[: params.L])
    return ComplexSignal(r, params.T_s)


def add_noise(
    signal: ComplexSignal,
    snr_db: float,
    seed: int,
    params: RadarParams,
    ref_energy: float,
) -> ComplexSignal:
    """Add circular complex white Gaussian noise calibrated against a reference.

    The per-sample noise variance is sigma^2 = ref_energy / (N M 10^{snr/10}),
    so the frame SNR sum|s|^2 / (N M sigma^2) equals the request.  ``ref_energy``
    is the energy of the clean transmitted pulse.  ``snr_db = inf`` returns the
    input unchanged.  Noise is drawn from a Philox stream keyed by ``seed``.
    """
    if ref_energy <= 0:
        raise ValueError(f"ref_energy must be positive, got {ref_energy}")
    if math.isinf(snr_db) and snr_db > 0:
        return signal
    sigma2 = ref_energy / (params.frame_len * 10 ** (snr_db / 10.0))
    rng = np.random.Generator(np.random.Philox(seed))
    scale = math.sqrt(sigma2 / 2.0)
    noise = scale * (
        rng.standard_normal(params.frame_len) + 1j * rng.standard_normal(params.frame_len)
    )
    return ComplexSignal(signal.samples + noise, signal.sample_period)


def apply_receive_gating(signal: ComplexSignal, params: RadarParams) -> ComplexSignal:
    """Zero the samples recorded while the transmitter was still firing (j < L)."""
    gated = signal.samples.copy()
    gated[: params.L] = 0.0
    return ComplexSignal(gated, signal.sample_period)
