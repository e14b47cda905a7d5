"""Fractional delay-Doppler estimation for pulsed radar with
time-frequency coded Gaussian pulses."""

from .ambiguity import (
    AmbiguitySurface,
    SincLobeModel,
    continuous_ambiguity,
    discrete_ambiguity,
    sinc_conformance,
    sinc_model,
)
from .bench import BenchConfig, RmseReport, TrialRecord, run_trial, sweep, time_stages
from .channel import (
    ChannelTruth,
    add_noise,
    apply_channel,
    apply_receive_gating,
    h_matrix_entry,
)
from .codes import (
    CodeMatrix,
    DDMatrix,
    random_code,
    read_code,
    reference_bad_code,
    reference_good_code,
    to_delay_doppler,
    write_code,
)
from .config import ParameterError, RadarParams, load_params, make_params
from .estimator import (
    Detection,
    Estimate,
    coarse_detect,
    estimate,
    refine_quadratic,
    refine_sinc2d,
)
from .waveform import (
    ComplexSignal,
    evaluate_continuous,
    evaluate_transmitted,
    gaussian_pulse,
    synthesize_discrete,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguitySurface",
    "BenchConfig",
    "ChannelTruth",
    "CodeMatrix",
    "ComplexSignal",
    "DDMatrix",
    "Detection",
    "Estimate",
    "ParameterError",
    "RadarParams",
    "RmseReport",
    "SincLobeModel",
    "TrialRecord",
    "add_noise",
    "apply_channel",
    "apply_receive_gating",
    "coarse_detect",
    "continuous_ambiguity",
    "discrete_ambiguity",
    "estimate",
    "evaluate_continuous",
    "evaluate_transmitted",
    "gaussian_pulse",
    "h_matrix_entry",
    "load_params",
    "make_params",
    "random_code",
    "read_code",
    "reference_bad_code",
    "reference_good_code",
    "refine_quadratic",
    "refine_sinc2d",
    "run_trial",
    "sinc_conformance",
    "sinc_model",
    "sweep",
    "synthesize_discrete",
    "time_stages",
    "to_delay_doppler",
    "write_code",
]
