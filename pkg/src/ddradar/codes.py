"""Binary time-frequency spreading codes and their delay-Doppler transform.

A code is an N_t x N_f grid of +/-1 chips.  Row n indexes the time slot,
column c = m + N_f/2 indexes the subcarrier m in [-N_f/2, N_f/2).  Codes are
generated with a counter-based Philox RNG so a seed reproduces the same
matrix on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RadarParams


@dataclass(frozen=True)
class CodeMatrix:
    """Immutable +/-1 chip grid of shape (N_t, N_f)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError(f"code matrix must be 2-D, got shape {arr.shape}")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("code matrix entries must all be +1 or -1")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n_t(self) -> int:
        return self.entries.shape[0]

    @property
    def n_f(self) -> int:
        return self.entries.shape[1]

    def entry(self, n: int, col: int) -> int:
        """Chip at time slot n, stored column col = m + N_f/2."""
        return int(self.entries[n, col])

    @property
    def m_values(self) -> np.ndarray:
        """Signed subcarrier indices m = -N_f/2 .. N_f/2 - 1, one per column."""
        return np.arange(self.n_f) - self.n_f // 2

    def matches(self, params: RadarParams) -> bool:
        return self.n_t == params.N_t and self.n_f == params.N_f

    def require_match(self, params: RadarParams) -> None:
        if not self.matches(params):
            raise ValueError(
                f"code is {self.n_t}x{self.n_f} but params expect "
                f"{params.N_t}x{params.N_f}"
            )


@dataclass(frozen=True)
class DDMatrix:
    """Complex N x M grid in the delay-Doppler domain, periodic in both axes."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError(f"DD matrix must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def value(self, k: int, ell: int) -> complex:
        """Entry at Doppler index k, delay index ell, indices taken modulo."""
        n, m = self.entries.shape
        return complex(self.entries[k % n, ell % m])


def random_code(params: RadarParams, seed: int) -> CodeMatrix:
    """Draw each chip +1 or -1 with probability 1/2 (Philox stream ``seed``)."""
    rng = np.random.Generator(np.random.Philox(seed))
    bits = rng.integers(0, 2, size=(params.N_t, params.N_f))
    return CodeMatrix(bits * 2 - 1)


# 8x8 reference matrices: the first has an ambiguity surface that hugs the
# separable sinc lobe model, the second is a known counterexample whose
# surface is visibly skewed.  Both are used to pin the conformance screen.
_GOOD_8X8 = [
    [-1,  1, -1,  1, -1,  1, -1, -1],
    [-1, -1, -1,  1,  1, -1,  1,  1],
    [-1,  1,  1, -1, -1, -1,  1,  1],
    [-1, -1,  1,  1,  1, -1, -1,  1],
    [-1,  1,  1,  1, -1, -1, -1, -1],
    [-1,  1,  1, -1, -1, -1,  1,  1],
    [-1, -1,  1,  1,  1, -1, -1,  1],
    [ 1,  1,  1,  1, -1,  1,  1, -1],
]

_BAD_8X8 = [
    [-1, -1,  1, -1, -1, -1,  1,  1],
    [ 1,  1,  1,  1,  1, -1,  1,  1],
    [-1, -1, -1, -1, -1,  1, -1, -1],
    [ 1, -1, -1, -1,  1,  1,  1, -1],
    [-1, -1,  1,  1,  1,  1, -1, -1],
    [ 1,  1, -1,  1,  1, -1,  1,  1],
    [ 1, -1,  1, -1,  1, -1,  1,  1],
    [-1,  1,  1, -1, -1, -1,  1,  1],
]


def reference_good_code() -> CodeMatrix:
    """The 8x8 reference code that passes sinc conformance."""
    return CodeMatrix(np.array(_GOOD_8X8))


def reference_bad_code() -> CodeMatrix:
    """The 8x8 reference code rejected by sinc conformance."""
    return CodeMatrix(np.array(_BAD_8X8))


def to_delay_doppler(code: CodeMatrix, params: RadarParams) -> DDMatrix:
    """Transform a time-frequency code to the delay-Doppler domain.

    X[k, ell] = (1/M) * sum_n sum_m X_tf[n, m] e^{+2 pi i n k / N} e^{-2 pi i m ell / M}
    with X_tf zero outside the occupied N_t x N_f block.  Diagnostic utility;
    no estimator path depends on it.
    """
    code.require_match(params)
    full = np.zeros((params.N, params.M), dtype=np.complex128)
    cols = np.mod(code.m_values, params.M)
    full[np.arange(params.N_t)[:, None], cols[None, :]] = code.entries
    dd = (params.N / params.M) * np.fft.fft(np.fft.ifft(full, axis=0), axis=1)
    return DDMatrix(dd)


def from_delay_doppler(dd: DDMatrix, params: RadarParams) -> np.ndarray:
    """Inverse of :func:`to_delay_doppler`; returns the full N x M grid."""
    return (params.M / params.N) * np.fft.fft(np.fft.ifft(dd.entries, axis=1), axis=0)


def write_code(path: str | Path, code: CodeMatrix) -> None:
    """Write N_t lines of N_f space-separated +/-1 integers."""
    lines = [" ".join(f"{v:d}" for v in row) for row in code.entries]
    Path(path).write_text("\n".join(lines) + "\n")


def read_code(path: str | Path, params: RadarParams | None = None) -> CodeMatrix:
    """Parse a code file, rejecting any token other than -1 or 1."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        for tok in line.split():
            if tok not in ("1", "-1", "+1"):
                raise ValueError(f"{path}:{lineno}: invalid code token {tok!r}")
            row.append(int(tok))
        rows.append(row)
    if not rows:
        raise ValueError(f"{path}: empty code file")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: ragged rows in code file")
    code = CodeMatrix(np.array(rows))
    if params is not None:
        code.require_match(params)
    return code
