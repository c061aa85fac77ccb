"""Superselection sectors: projector families, the block-diagonal projection
channel, off-diagonal coherence norms, sector probabilities and power-law
envelope fits for their decay.

A sector structure is a complete family of mutually orthogonal projectors.
States compatible with it are exactly the fixed points of the channel
W -> sum_m P_m W P_m; the distance of a state from its projection measures
how much intersector coherence it still carries.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    InsufficientData,
    NonDecaying,
    NotComplete,
    NotIdempotent,
    NotOrthogonal,
)
from .operators import hs_norm, schatten_norms
from .states import DensityOperator

PROJECTOR_TOL = 1e-10


class SectorStructure:
    """Complete family of mutually orthogonal projectors with labels."""

    __slots__ = ("projectors", "labels")

    def __init__(self, projectors, labels=None):
        mats = tuple(np.asarray(p, dtype=complex) for p in projectors)
        if not mats:
            raise DimensionMismatch("need at least one projector")
        if labels is None:
            labels = tuple(str(i) for i in range(len(mats)))
        labels = tuple(str(label) for label in labels)
        if len(labels) != len(mats):
            raise DimensionMismatch("need one label per projector")
        self.projectors = mats
        self.labels = labels

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self):
        return len(self.projectors)

    def __repr__(self):
        return f"SectorStructure(labels={list(self.labels)}, dim={self.dim})"


def block_diagonal_sectors(block_dims: Sequence[int], labels=None) -> SectorStructure:
    """Sectors projecting onto consecutive basis blocks of the given sizes."""
    dim = int(sum(block_dims))
    projectors = []
    offset = 0
    for size in block_dims:
        p = np.zeros((dim, dim), dtype=complex)
        p[offset:offset + size, offset:offset + size] = np.eye(size)
        projectors.append(p)
        offset += size
    return SectorStructure(projectors, labels)


def validate_sectors(s: SectorStructure) -> SectorStructure:
    """Return the input iff every projector invariant holds.

    Checks each P for Hermitian idempotency, each pair for orthogonality and
    the family for completeness; the raised error names the offending index
    or index pair.
    """
    dim = s.dim
    for m, p in enumerate(s.projectors):
        if p.shape != (dim, dim):
            raise DimensionMismatch(f"projector {m} has shape {p.shape}, expected {(dim, dim)}")
        if hs_norm(p - p.conj().T) > PROJECTOR_TOL:
            raise NotIdempotent(m, f"projector {m} is not Hermitian")
        if hs_norm(p @ p - p) > PROJECTOR_TOL:
            raise NotIdempotent(m)
    for m in range(len(s)):
        for n in range(m + 1, len(s)):
            if hs_norm(s.projectors[m] @ s.projectors[n]) > PROJECTOR_TOL:
                raise NotOrthogonal((m, n))
    total = sum(s.projectors)
    if hs_norm(total - np.eye(dim)) > PROJECTOR_TOL:
        raise NotComplete(f"projectors sum to distance {hs_norm(total - np.eye(dim)):.2e} from identity")
    return s


def _check_dims(w: DensityOperator, s: SectorStructure):
    if w.dim != s.dim:
        raise DimensionMismatch(f"state dim {w.dim} does not match sector dim {s.dim}")


def _projected_matrix(w: DensityOperator, s: SectorStructure) -> np.ndarray:
    out = np.zeros_like(w.matrix)
    for p in s.projectors:
        out += p @ w.matrix @ p
    return out


def sector_project(w: DensityOperator, s: SectorStructure) -> DensityOperator:
    """Block-diagonal part sum_m P_m W P_m of a state.

    Trace preserving, positivity preserving and idempotent; states already
    compatible with the sectors pass through unchanged.
    """
    _check_dims(w, s)
    return DensityOperator(_projected_matrix(w, s))


class OffDiagonalNorms(NamedTuple):
    hs: float
    trace: float


def off_diagonal_norms(w: DensityOperator, s: SectorStructure) -> OffDiagonalNorms:
    """Hilbert-Schmidt and trace norms of the intersector coherence part."""
    _check_dims(w, s)
    residual = w.matrix - _projected_matrix(w, s)
    norms = schatten_norms(residual)
    return OffDiagonalNorms(norms.hs, norms.trace)


def sector_probabilities(w: DensityOperator, s: SectorStructure) -> np.ndarray:
    """Probabilities tr(W P_m) of finding the state in each sector.

    These are the unambiguous classical data a sector structure assigns to a
    state; they are untouched by the projection channel.
    """
    _check_dims(w, s)
    return np.array([np.trace(w.matrix @ p).real for p in s.projectors])


@dataclass(frozen=True)
class DecayFit:
    """Envelope bound C (1 + delta t)^(-gamma) fitted over a time window.

    ``residual`` is the rms log-residual of the regression on the envelope
    points.  ``superpolynomial`` flags gamma > 20, where the power-law form
    is a bound only, not a tight description of the decay.
    """

    C: float
    delta: float
    gamma: float
    window: Tuple[float, float]
    residual: float
    superpolynomial: bool = False

    def bound(self, t):
        return self.C * (1.0 + self.delta * np.abs(t)) ** (-self.gamma)


SUPERPOLY_GAMMA = 20.0


def _envelope_indices(values: np.ndarray, minimum: int) -> np.ndarray:
    # Local maxima of an oscillating sequence.  A (near-)monotone decay has
    # few or none, and there every point not exceeded later sits on the
    # envelope, so fall back to the right-running maxima; if even those are
    # scarce (growing or flat series) regress through everything and let the
    # slope check decide.
    n = values.size
    interior = np.arange(1, n - 1)
    peaks = interior[
        (values[interior] >= values[interior - 1]) & (values[interior] >= values[interior + 1])
    ]
    if peaks.size >= minimum:
        return peaks
    running = np.maximum.accumulate(values[::-1])[::-1]
    on_envelope = np.flatnonzero(values >= running)
    if on_envelope.size >= minimum:
        return on_envelope
    return np.arange(n)


def fit_power_law_decay(samples, delta: float, window: Optional[Tuple[float, float]] = None,
                        min_envelope_points: int = 8) -> DecayFit:
    """Fit a dominating power-law envelope to a decaying |value| series.

    Regression runs through local maxima of |value| inside ``window`` (the
    last half of the time range by default): fitting through all samples of
    an oscillating series biases the exponent upward.  The prefactor is then
    inflated minimally so the bound dominates every windowed sample.  The
    spectral-gap parameter ``delta`` is model data supplied by the caller,
    not fitted; joint estimation of (C, delta, gamma) is ill conditioned.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("samples must be a sequence of (t, value) pairs")
    t = data[:, 0]
    values = np.abs(data[:, 1])
    if t.size and (t[0] < 0 or np.any(np.diff(t) <= 0)):
        raise ValueError("times must be nonnegative and strictly increasing")
    if delta <= 0:
        raise ValueError("delta must be positive")

    if window is None:
        window = (t[0] + (t[-1] - t[0]) / 2.0, t[-1]) if t.size else (0.0, 0.0)
    lo, hi = float(window[0]), float(window[1])
    in_window = (t >= lo) & (t <= hi)
    tw = t[in_window]
    vw = values[in_window]
    if tw.size < min_envelope_points:
        raise InsufficientData(f"only {tw.size} samples in window [{lo:g}, {hi:g}]")

    env = _envelope_indices(vw, min_envelope_points)
    env = env[vw[env] > 0]
    if env.size < min_envelope_points:
        raise InsufficientData(
            f"only {env.size} envelope points in window [{lo:g}, {hi:g}]"
        )

    x = np.log1p(delta * tw[env])
    y = np.log(vw[env])
    slope, intercept = np.polyfit(x, y, 1)
    if slope >= 0:
        raise NonDecaying(f"envelope slope {slope:g} is not negative")
    gamma = -float(slope)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))

    # Smallest C that keeps the bound above every windowed sample.
    positive = vw > 0
    c_reg = float(np.exp(intercept))
    c_dominate = float(np.max(vw[positive] * (1.0 + delta * tw[positive]) ** gamma, initial=0.0))
    c = max(c_reg, c_dominate)
    return DecayFit(
        C=c,
        delta=float(delta),
        gamma=gamma,
        window=(lo, hi),
        residual=residual,
        superpolynomial=gamma > SUPERPOLY_GAMMA,
    )
