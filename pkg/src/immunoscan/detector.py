"""Detector intervals over the acquirer's history, and masking.

Each feature gets an interval [mu - n*sigma - c, mu + n*sigma + c]
built from the feature's mean and population standard deviation over
the years, where c = u * g perturbs the bounds by a draw u in [-1, 1]
times the feature's mean growth rate.  Values of the acquirer's own
grid that fall inside their interval are zeroed ("masked"); what
survives is its outlier signature, the accepted-detectors matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InsufficientHistoryError,
    InvalidParameterError,
    ShapeMismatchError,
)
from .normalize import NormalizedPanel, as_panel
from .panel import FeaturePanel

GROWTH_NORMALIZED = "normalized"
GROWTH_RAW = "raw"
GROWTH_BASES = (GROWTH_NORMALIZED, GROWTH_RAW)


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature mean, population std, and mean growth fraction."""

    features: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    growth: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for name in ("mean", "std", "growth"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (len(self.features),):
                raise ShapeMismatchError(f"{name} must have one entry per feature")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.std < 0):
            raise InvalidParameterError("standard deviation cannot be negative")


@dataclass(frozen=True)
class DetectorSet:
    """Per-feature [lower, upper] intervals plus the realized change.

    An interval with upper < lower is treated as empty and masks
    nothing.  ``warnings`` carries advisory span-bound notes.
    """

    features: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    n: float
    change: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for name in ("lower", "upper", "change"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (len(self.features),):
                raise ShapeMismatchError(f"{name} must have one entry per feature")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.n < 0:
            raise InvalidParameterError("span index n must be >= 0")

    @property
    def empty(self) -> np.ndarray:
        """Boolean flags for inverted (empty) intervals."""
        return self.upper < self.lower


@dataclass(frozen=True)
class AcceptedDetectors:
    """The self's grid after masking, with an explicit kept/masked grid.

    ``matrix`` and ``mask`` are years x features; ``mask`` is True where
    a cell was kept (outside its detector interval), and masked cells
    hold exactly 0.0 in ``matrix``.  A kept cell's value can itself be
    zero, so the mask is the only reliable record of what was masked.
    """

    features: tuple[str, ...]
    matrix: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if (
            matrix.ndim != 2
            or matrix.shape[1] != len(self.features)
            or mask.shape != matrix.shape
        ):
            raise ShapeMismatchError(
                f"matrix/mask must be years x {len(self.features)} features, "
                f"got {matrix.shape} and {mask.shape}"
            )
        if np.any(matrix[~mask] != 0.0):
            raise InvalidParameterError("masked cells must hold 0.0")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "mask", mask)

    @property
    def n_years(self) -> int:
        return self.matrix.shape[0]


def growth_transitions(series) -> tuple[list[float], int]:
    """Year-over-year growth fractions, with zero-baseline pairs skipped.

    Returns (rates, skipped_count).
    """
    series = [float(x) for x in series]
    rates: list[float] = []
    skipped = 0
    for prev, cur in zip(series, series[1:]):
        if prev == 0.0:
            skipped += 1
            continue
        rates.append((cur - prev) / prev)
    return rates, skipped


def mean_growth_rate(series) -> float:
    """Arithmetic mean of consecutive growth fractions of a series.

    Growth for a pair is (present - last) / last; pairs with a zero
    baseline are skipped.  Returns 0.0 when every pair is skipped.
    The result is a dimensionless fraction (0.10 means 10% per year).
    """
    if len(series) < 2:
        raise InsufficientHistoryError(
            "growth rate needs at least two years of data"
        )
    rates, _ = growth_transitions(series)
    if not rates:
        return 0.0
    return sum(rates) / len(rates)


def _single_entity_values(panel: FeaturePanel, what: str) -> np.ndarray:
    if len(panel.entities) != 1:
        raise InvalidParameterError(
            f"{what} must hold exactly one entity, got {len(panel.entities)}"
        )
    return panel.values[0]


def feature_stats(
    self_panel: NormalizedPanel | FeaturePanel,
    raw_panel: FeaturePanel | None = None,
    growth_basis: str = GROWTH_NORMALIZED,
) -> FeatureStats:
    """Mean, population std, and mean growth per feature of the self.

    Mean and std are always computed on the normalized values;
    ``growth_basis`` selects whether growth is measured on the
    normalized or the raw series (``raw_panel`` is required for the
    latter).  Needs at least two years of history.
    """
    if growth_basis not in GROWTH_BASES:
        raise InvalidParameterError(
            f"growth basis must be one of {GROWTH_BASES}, got {growth_basis!r}"
        )
    norm = as_panel(self_panel)
    grid = _single_entity_values(norm, "self panel")
    if grid.shape[0] < 2:
        raise InsufficientHistoryError(
            "feature statistics need at least two years of data"
        )

    mean = grid.mean(axis=0)
    std = np.sqrt(np.mean((grid - mean) ** 2, axis=0))

    if growth_basis == GROWTH_RAW:
        if raw_panel is None:
            raise InvalidParameterError(
                "raw growth basis requires the raw self panel"
            )
        if raw_panel.features != norm.features or raw_panel.years != norm.years:
            raise ShapeMismatchError(
                "raw panel axes do not match the normalized panel"
            )
        growth_grid = _single_entity_values(raw_panel, "raw self panel")
    else:
        growth_grid = grid

    growth = np.empty(len(norm.features))
    warnings: list[str] = []
    for fi, feature in enumerate(norm.features):
        rates, skipped = growth_transitions(growth_grid[:, fi])
        if skipped:
            warnings.append(
                f"growth: skipped {skipped} zero-baseline transition(s) "
                f"for feature={feature!r}"
            )
        if not rates:
            warnings.append(
                f"growth: all transitions skipped for feature={feature!r}, "
                f"using 0.0"
            )
            growth[fi] = 0.0
        else:
            growth[fi] = sum(rates) / len(rates)

    return FeatureStats(
        features=norm.features,
        mean=mean,
        std=std,
        growth=growth,
        warnings=tuple(warnings),
    )


def detector_ranges(stats: FeatureStats, n: float, u) -> DetectorSet:
    """Intervals [mu - n*std - c, mu + n*std + c] with c = u * growth.

    ``u`` supplies one draw in [-1, 1] per feature.  Emits an advisory
    warning for any feature where n exceeds mean/std (the span bound is
    advisory, not enforced, since a single near-zero-mean feature would
    otherwise forbid reasonable n values).
    """
    if n < 0:
        raise InvalidParameterError(f"span index n must be >= 0, got {n}")
    u = np.asarray(u, dtype=float)
    if u.shape != (len(stats.features),):
        raise InvalidParameterError(
            f"u must supply one value per feature "
            f"({len(stats.features)}), got shape {u.shape}"
        )
    if np.any((u < -1.0) | (u > 1.0)):
        raise InvalidParameterError("u values must lie in [-1, 1]")

    change = u * stats.growth
    half = n * stats.std
    lower = stats.mean - half - change
    upper = stats.mean + half + change

    warnings = []
    positive = stats.std > 0
    over = positive & (n > np.divide(
        stats.mean,
        np.where(positive, stats.std, 1.0),
    ))
    for fi in np.nonzero(over)[0]:
        warnings.append(
            f"span advisory: n={n:g} exceeds mean/std="
            f"{stats.mean[fi] / stats.std[fi]:.6g} "
            f"for feature={stats.features[fi]!r}"
        )

    return DetectorSet(
        features=stats.features,
        lower=lower,
        upper=upper,
        n=float(n),
        change=change,
        warnings=tuple(warnings),
    )


def apply_mask(self_matrix: np.ndarray, ranges: DetectorSet) -> AcceptedDetectors:
    """Zero every self cell inside its feature's detector interval.

    Bounds are inclusive: a value exactly equal to lower or upper is
    masked.  Empty (inverted) intervals mask nothing.  ``self_matrix``
    is the single entity's years x features grid of normalized values.
    """
    matrix = np.asarray(self_matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != len(ranges.features):
        raise ShapeMismatchError(
            f"self matrix must be years x {len(ranges.features)} features, "
            f"got shape {matrix.shape}"
        )
    inside = (
        (matrix >= ranges.lower)
        & (matrix <= ranges.upper)
        & ~ranges.empty
    )
    kept = ~inside
    return AcceptedDetectors(
        features=ranges.features,
        matrix=np.where(kept, matrix, 0.0),
        mask=kept,
    )
