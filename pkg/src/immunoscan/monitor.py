"""Dissimilarity scoring of candidates against the masked self.

For every feature, the self's accepted (masked) year-series is compared
against the candidate's year-series, either by Euclidean distance or by
the angle between the vectors; a candidate's score is the mean over
features.  Rank 1 goes to the most dissimilar candidate, and ties keep
panel order.

Two comparison modes exist.  ``zero-include`` (default) keeps the full
year dimension, masked cells contributing as zeros.  ``exclude`` drops
masked coordinates from the comparison; a feature with no kept
coordinate is then excluded from the average altogether.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detector import AcceptedDetectors
from .errors import InvalidParameterError, NoSignalError, ShapeMismatchError
from .normalize import NormalizedPanel, as_panel
from .panel import FeaturePanel

EUCLIDEAN = "euclidean"
COSINE = "cosine"
MEASURES = (EUCLIDEAN, COSINE)

ZERO_INCLUDE = "zero-include"
EXCLUDE = "exclude"
MASK_MODES = (ZERO_INCLUDE, EXCLUDE)

RIGHT_ANGLE = math.pi / 2.0


@dataclass(frozen=True)
class DissimilarityScores:
    """Per-candidate mean dissimilarity plus per-feature components.

    ``components`` is entities x features; entries for skipped features
    are NaN and ``skipped_features`` names them.  A candidate's score is
    the mean of its non-skipped components.
    """

    measure: str
    entities: tuple[str, ...]
    scores: np.ndarray
    components: np.ndarray
    skipped_features: tuple[str, ...] = ()

    def score_of(self, entity: str) -> float:
        return float(self.scores[self.entities.index(entity)])


@dataclass(frozen=True)
class TrialRanking:
    """Entities ordered most-dissimilar first, with their scores."""

    order: tuple[str, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.order) != len(self.scores):
            raise ShapeMismatchError("order and scores must align")
        if any(b > a for a, b in zip(self.scores, self.scores[1:])):
            raise InvalidParameterError("scores must be non-increasing")

    def rank_of(self, entity: str) -> int:
        """1-based rank of an entity in this trial."""
        return self.order.index(entity) + 1


def feature_euclidean(self_vec, nonself_vec) -> float:
    """Euclidean distance between two equal-length year-series."""
    a = np.asarray(self_vec, dtype=float)
    b = np.asarray(nonself_vec, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeMismatchError(
            f"vectors must share one axis, got {a.shape} and {b.shape}"
        )
    return float(np.sqrt(np.sum((a - b) ** 2)))


def feature_cosine_angle(self_vec, nonself_vec) -> float | None:
    """Angle in [0, pi] between two year-series; None if either is zero.

    The cosine is clamped to [-1, 1] before arccos to guard against
    floating-point drift on near-parallel vectors.
    """
    a = np.asarray(self_vec, dtype=float)
    b = np.asarray(nonself_vec, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeMismatchError(
            f"vectors must share one axis, got {a.shape} and {b.shape}"
        )
    norm_a = float(np.sqrt(np.sum(a * a)))
    norm_b = float(np.sqrt(np.sum(b * b)))
    if norm_a == 0.0 or norm_b == 0.0:
        return None
    cos = float(np.sum(a * b)) / (norm_a * norm_b)
    cos = min(1.0, max(-1.0, cos))
    return math.acos(cos)


def batch_scores(
    accepted: np.ndarray,
    kept: np.ndarray,
    nonself_values: np.ndarray,
    measure: str,
    mask_mode: str = ZERO_INCLUDE,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Score a batch of masked self grids against the candidates.

    accepted, kept: (trials, years, features); nonself_values:
    (entities, years, features).  Returns (scores, components, skipped)
    with shapes (T, E), (T, E, F), (T, F).  Components of skipped
    features are NaN; a trial whose features are all skipped gets NaN
    scores, which callers must turn into a no-signal error.

    This kernel is the single implementation behind both the public
    scoring API (T = 1) and the Monte Carlo harness.
    """
    if measure not in MEASURES:
        raise InvalidParameterError(
            f"measure must be one of {MEASURES}, got {measure!r}"
        )
    if mask_mode not in MASK_MODES:
        raise InvalidParameterError(
            f"mask mode must be one of {MASK_MODES}, got {mask_mode!r}"
        )
    n_trials, n_years, n_feat = accepted.shape
    if nonself_values.ndim != 3 or nonself_values.shape[1:] != (n_years, n_feat):
        raise ShapeMismatchError(
            f"candidate values must be entities x {n_years} x {n_feat}, "
            f"got {nonself_values.shape}"
        )

    if measure == EUCLIDEAN:
        diff = accepted[:, None, :, :] - nonself_values[None, :, :, :]
        sq = diff * diff
        if mask_mode == EXCLUDE:
            sq = sq * kept[:, None, :, :]
            skipped = ~kept.any(axis=1)
        else:
            skipped = np.zeros((n_trials, n_feat), dtype=bool)
        components = np.sqrt(sq.sum(axis=2))
    else:
        # Masked cells are zero, so these sums already run over kept
        # coordinates only; the mask mode changes the candidate norm.
        dot = (accepted[:, None, :, :] * nonself_values[None, :, :, :]).sum(axis=2)
        self_sq = (accepted * accepted).sum(axis=1)
        if mask_mode == EXCLUDE:
            non_sq = (
                (nonself_values * nonself_values)[None, :, :, :]
                * kept[:, None, :, :]
            ).sum(axis=2)
        else:
            non_sq = np.broadcast_to(
                (nonself_values * nonself_values).sum(axis=1)[None, :, :],
                dot.shape,
            )
        skipped = self_sq == 0.0
        denom = np.sqrt(self_sq)[:, None, :] * np.sqrt(non_sq)
        with np.errstate(divide="ignore", invalid="ignore"):
            cos = np.where(denom > 0.0, dot / denom, 0.0)
        cos = np.clip(cos, -1.0, 1.0)
        components = np.where(non_sq == 0.0, RIGHT_ANGLE, np.arccos(cos))

    components = np.where(skipped[:, None, :], np.nan, components)
    active = ~skipped
    n_active = active.sum(axis=1)
    summed = np.where(skipped[:, None, :], 0.0, components).sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(n_active[:, None] > 0, summed / n_active[:, None], np.nan)
    return scores, components, skipped


def rank_order(scores: np.ndarray) -> np.ndarray:
    """Entity indices ordered by descending score, ties keeping panel order.

    Accepts (E,) or (T, E); returns the same shape of int indices where
    position 0 holds the rank-1 entity index.
    """
    return np.argsort(-scores, axis=-1, kind="stable")


def score_entities(
    accepted: AcceptedDetectors,
    nonself: NormalizedPanel | FeaturePanel,
    measure: str,
    mask_mode: str = ZERO_INCLUDE,
) -> DissimilarityScores:
    """Mean per-feature dissimilarity of every candidate to the self.

    Angle mode skips features whose accepted self series is all zero
    (typically fully masked ones) from every candidate's average and
    reports them in ``skipped_features``; a candidate series that is
    itself all zero on a usable feature counts as orthogonal (pi/2).
    Raises NoSignalError when no feature is usable at all.
    """
    panel = as_panel(nonself)
    if panel.features != accepted.features:
        raise ShapeMismatchError(
            "candidate panel features do not match the accepted-detectors grid"
        )
    if len(panel.years) != accepted.n_years:
        raise ShapeMismatchError(
            f"candidate panel has {len(panel.years)} years, accepted grid "
            f"has {accepted.n_years}"
        )
    scores, components, skipped = batch_scores(
        accepted.matrix[None, :, :],
        accepted.mask[None, :, :],
        panel.values,
        measure,
        mask_mode,
    )
    if skipped.all():
        raise NoSignalError(
            f"every feature was excluded from the {measure} average"
        )
    return DissimilarityScores(
        measure=measure,
        entities=panel.entities,
        scores=scores[0],
        components=components[0],
        skipped_features=tuple(
            f for f, s in zip(accepted.features, skipped[0]) if s
        ),
    )


def rank_entities(scores: DissimilarityScores) -> TrialRanking:
    """Order candidates most-dissimilar first.

    Sorting is by descending score; equal scores keep their panel
    order, so rankings are deterministic.
    """
    order = rank_order(scores.scores)
    return TrialRanking(
        order=tuple(scores.entities[i] for i in order),
        scores=tuple(float(scores.scores[i]) for i in order),
    )
