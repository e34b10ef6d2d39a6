"""Seeded Monte Carlo harness and rank-frequency aggregation.

Every trial draws detector perturbations from its own random substream,
derived deterministically from (master seed, trial index), so results
are bit-identical no matter how trials are chunked across workers.
Rank tables count, per candidate and rank, how often the candidate
achieved that rank across trials; counting is pure integer arithmetic,
so tables are exact.
"""

from __future__ import annotations

import concurrent.futures
import io
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .detector import (
    GROWTH_BASES,
    GROWTH_NORMALIZED,
    FeatureStats,
    feature_stats,
)
from .errors import InvalidParameterError, NoSignalError, ShapeMismatchError
from .monitor import (
    COSINE,
    EUCLIDEAN,
    MASK_MODES,
    MEASURES,
    ZERO_INCLUDE,
    batch_scores,
    rank_order,
)
from .normalize import PER_ENTITY, SCOPES
from .panel import FeaturePanel, PanelSplit

U_UNIFORM = "uniform"
U_TERNARY = "ternary"
U_MODES = (U_UNIFORM, U_TERNARY)

U_PER_FEATURE = "per-feature"
U_GLOBAL = "global"
U_SCOPES = (U_PER_FEATURE, U_GLOBAL)

MAX_SEED = 2**64 - 1

_CHUNK_SIZE = 250


@dataclass(frozen=True)
class TrialConfig:
    """Everything that determines a run apart from the data itself."""

    n: float = 0.45
    trials: int = 1000
    seed: int = 0
    u_mode: str = U_UNIFORM
    u_scope: str = U_PER_FEATURE
    growth_basis: str = GROWTH_NORMALIZED
    norm_scope: str = PER_ENTITY
    measures: tuple[str, ...] = (EUCLIDEAN, COSINE)
    mask_mode: str = ZERO_INCLUDE

    def __post_init__(self):
        if not np.isfinite(self.n) or self.n < 0:
            raise InvalidParameterError(f"span index n must be >= 0, got {self.n}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise InvalidParameterError(
                f"trial count must be a positive integer, got {self.trials!r}"
            )
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise InvalidParameterError(
                f"seed must be an unsigned 64-bit integer, got {self.seed!r}"
            )
        for value, allowed, name in (
            (self.u_mode, U_MODES, "u mode"),
            (self.u_scope, U_SCOPES, "u scope"),
            (self.growth_basis, GROWTH_BASES, "growth basis"),
            (self.norm_scope, SCOPES, "normalization scope"),
            (self.mask_mode, MASK_MODES, "mask mode"),
        ):
            if value not in allowed:
                raise InvalidParameterError(
                    f"{name} must be one of {allowed}, got {value!r}"
                )
        measures = tuple(self.measures)
        if not measures:
            raise InvalidParameterError("at least one measure is required")
        if len(set(measures)) != len(measures):
            raise InvalidParameterError("measures must not repeat")
        for m in measures:
            if m not in MEASURES:
                raise InvalidParameterError(
                    f"measure must be one of {MEASURES}, got {m!r}"
                )
        object.__setattr__(self, "measures", measures)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "u_mode": self.u_mode,
            "u_scope": self.u_scope,
            "growth_basis": self.growth_basis,
            "norm_scope": self.norm_scope,
            "measures": list(self.measures),
            "mask_mode": self.mask_mode,
        }


@dataclass(frozen=True)
class RankFrequencyTable:
    """ranks x entities counts over a run; rank 1 = most dissimilar.

    counts[r - 1][e] is how many trials put entity e at rank r.  For a
    table produced by the harness, every row and every column sums to
    the trial count (each trial hands out each rank exactly once); the
    container itself stays permissive so externally published tables
    can be represented too.
    """

    measure: str
    entities: tuple[str, ...]
    counts: np.ndarray
    trials: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.entities)
        if counts.shape != (k, k):
            raise ShapeMismatchError(
                f"counts must be {k} ranks x {k} entities, got {counts.shape}"
            )
        if np.any(counts < 0):
            raise InvalidParameterError("counts must be non-negative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "entities", tuple(self.entities))

    def column(self, entity: str) -> np.ndarray:
        """Counts for one entity, indexed by rank - 1."""
        return self.counts[:, self.entities.index(entity)]

    def is_doubly_stochastic(self) -> bool:
        """True when every row and column sums to the trial count."""
        return bool(
            np.all(self.counts.sum(axis=0) == self.trials)
            and np.all(self.counts.sum(axis=1) == self.trials)
        )

    def to_csv(self) -> str:
        """CSV with header ``rank,<entity>,...`` and one row per rank."""
        out = io.StringIO()
        out.write("rank," + ",".join(self.entities) + "\n")
        for r in range(len(self.entities)):
            out.write(
                str(r + 1) + "," + ",".join(str(c) for c in self.counts[r]) + "\n"
            )
        return out.getvalue()


@dataclass(frozen=True)
class EntitySummary:
    """How one candidate fared across the trials."""

    modal_rank: int
    top1_share: float
    mean_rank: float


@dataclass(frozen=True)
class TrialSummary:
    measure: str
    trials: int
    entities: tuple[str, ...]
    per_entity: dict[str, EntitySummary] = field(compare=False)


@dataclass(frozen=True)
class TrialResult:
    """Per-trial outcome: the u draws and, per measure, scores and order."""

    index: int
    u: np.ndarray
    scores: dict[str, np.ndarray]
    rankings: dict[str, tuple[str, ...]]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """The random substream for one trial of a run.

    Derived from (seed, trial index) alone, so any partitioning of
    trials across workers sees identical draws.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    )


def draw_u(
    substream: np.random.Generator,
    mode: str,
    count: int,
    scope: str = U_PER_FEATURE,
) -> np.ndarray:
    """Draw the per-feature uncertainty values for one trial.

    uniform: continuous uniform on [-1, 1]; ternary: equiprobable from
    {-1, 0, +1}.  Global scope draws once and replicates across all
    features.
    """
    if mode not in U_MODES:
        raise InvalidParameterError(f"u mode must be one of {U_MODES}, got {mode!r}")
    if scope not in U_SCOPES:
        raise InvalidParameterError(
            f"u scope must be one of {U_SCOPES}, got {scope!r}"
        )
    if count < 1:
        raise InvalidParameterError("feature count must be >= 1")
    size = 1 if scope == U_GLOBAL else count
    if mode == U_UNIFORM:
        values = substream.uniform(-1.0, 1.0, size)
    else:
        values = substream.integers(-1, 2, size).astype(float)
    if scope == U_GLOBAL:
        values = np.full(count, values[0])
    return values


def _u_matrix(config: TrialConfig, n_features: int, start: int, stop: int) -> np.ndarray:
    rows = np.empty((stop - start, n_features))
    for t in range(start, stop):
        rows[t - start] = draw_u(
            trial_rng(config.seed, t), config.u_mode, n_features, config.u_scope
        )
    return rows


def _chunk_outcomes(
    config: TrialConfig,
    stats: FeatureStats,
    self_matrix: np.ndarray,
    nonself_values: np.ndarray,
    start: int,
    stop: int,
) -> tuple[np.ndarray, dict[str, np.ndarray], dict[str, np.ndarray], int | None]:
    """Run trials [start, stop): u draws, per-measure scores and orders.

    Returns (u, scores-by-measure, orders-by-measure, first trial index
    whose features were all skipped, or None).
    """
    u = _u_matrix(config, len(stats.features), start, stop)
    change = u * stats.growth
    half = config.n * stats.std
    lower = (stats.mean - half) - change
    upper = (stats.mean + half) + change
    nonempty = lower <= upper
    inside = (
        (self_matrix[None, :, :] >= lower[:, None, :])
        & (self_matrix[None, :, :] <= upper[:, None, :])
        & nonempty[:, None, :]
    )
    kept = ~inside
    accepted = np.where(kept, self_matrix[None, :, :], 0.0)

    scores: dict[str, np.ndarray] = {}
    orders: dict[str, np.ndarray] = {}
    no_signal: int | None = None
    for measure in config.measures:
        m_scores, _, skipped = batch_scores(
            accepted, kept, nonself_values, measure, config.mask_mode
        )
        dead = skipped.all(axis=1)
        if dead.any():
            first = start + int(np.argmax(dead))
            if no_signal is None or first < no_signal:
                no_signal = first
        scores[measure] = m_scores
        orders[measure] = rank_order(m_scores)
    return u, scores, orders, no_signal


def _prepare(
    config: TrialConfig,
    split: PanelSplit,
    raw_self: FeaturePanel | None,
) -> tuple[FeatureStats, np.ndarray, np.ndarray]:
    stats = feature_stats(split.self_panel, raw_self, config.growth_basis)
    return stats, split.self_panel.values[0], split.nonself_panel.values


def run_trials(
    config: TrialConfig,
    split: PanelSplit,
    raw_self: FeaturePanel | None = None,
    workers: int = 1,
) -> dict[str, RankFrequencyTable]:
    """Run the full harness and return one rank table per measure.

    ``split`` holds normalized values; ``raw_self`` supplies the raw
    self history when the growth basis is raw.  Identical (config,
    data) produce identical tables for any ``workers`` value.  A trial
    whose features are all excluded from averaging aborts the run with
    a NoSignalError naming the trial.
    """
    if workers < 1:
        raise InvalidParameterError("workers must be >= 1")
    stats, self_matrix, nonself_values = _prepare(config, split, raw_self)
    entities = split.nonself_panel.entities
    k = len(entities)

    spans = [
        (t, min(t + _CHUNK_SIZE, config.trials))
        for t in range(0, config.trials, _CHUNK_SIZE)
    ]

    def run_span(span):
        start, stop = span
        _, _, orders, no_signal = _chunk_outcomes(
            config, stats, self_matrix, nonself_values, start, stop
        )
        return orders, no_signal

    if workers == 1 or len(spans) == 1:
        outcomes = [run_span(s) for s in spans]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_span, spans))

    bad = [ns for _, ns in outcomes if ns is not None]
    if bad:
        raise NoSignalError(
            "every feature was excluded from averaging", trial=min(bad)
        )

    tables: dict[str, RankFrequencyTable] = {}
    for measure in config.measures:
        counts = np.zeros((k, k), dtype=np.int64)
        for orders, _ in outcomes:
            order = orders[measure]
            for r in range(k):
                counts[r] += np.bincount(order[:, r], minlength=k)
        table = RankFrequencyTable(
            measure=measure, entities=entities, counts=counts, trials=config.trials
        )
        if not table.is_doubly_stochastic():
            raise AssertionError(
                "rank table lost double stochasticity; this is a bug"
            )
        tables[measure] = table
    return tables


def iter_trial_results(
    config: TrialConfig,
    split: PanelSplit,
    raw_self: FeaturePanel | None = None,
) -> Iterator[TrialResult]:
    """Yield every trial's u draws, scores, and rankings in order.

    Uses the same computation as run_trials; intended for inspection
    and for cross-checking single trials against reference
    implementations.
    """
    stats, self_matrix, nonself_values = _prepare(config, split, raw_self)
    entities = split.nonself_panel.entities
    for start in range(0, config.trials, _CHUNK_SIZE):
        stop = min(start + _CHUNK_SIZE, config.trials)
        u, scores, orders, no_signal = _chunk_outcomes(
            config, stats, self_matrix, nonself_values, start, stop
        )
        for t in range(start, stop):
            if no_signal is not None and t == no_signal:
                raise NoSignalError(
                    "every feature was excluded from averaging", trial=t
                )
            yield TrialResult(
                index=t,
                u=u[t - start],
                scores={m: scores[m][t - start] for m in config.measures},
                rankings={
                    m: tuple(entities[i] for i in orders[m][t - start])
                    for m in config.measures
                },
            )


def column_summary(counts, trials: int) -> EntitySummary:
    """Summary statistics for one entity's rank counts.

    ``counts`` is indexed by rank - 1; shares use ``trials`` as the
    denominator even if the column sums differently, so columns from
    externally reported tables summarize as printed.  Modal ties
    resolve to the smallest rank.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.ndim != 1 or counts.size < 1:
        raise ShapeMismatchError("counts must be a non-empty vector")
    if np.any(counts < 0):
        raise InvalidParameterError("counts must be non-negative")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    ranks = np.arange(1, counts.size + 1)
    return EntitySummary(
        modal_rank=int(ranks[np.argmax(counts)]),
        top1_share=int(counts[0]) / trials,
        mean_rank=int(np.sum(ranks * counts)) / trials,
    )


def summarize(table: RankFrequencyTable) -> TrialSummary:
    """Per-entity modal rank, top-1 share, and mean rank for a table."""
    per_entity = {
        entity: column_summary(table.column(entity), table.trials)
        for entity in table.entities
    }
    return TrialSummary(
        measure=table.measure,
        trials=table.trials,
        entities=table.entities,
        per_entity=per_entity,
    )
