"""Pearson-correlation baseline over year-averaged feature vectors.

A simpler cross-check for the detector pipeline: average each entity's
features across years, correlate each candidate's vector with the
self's, and order candidates ascending by the coefficient, so the
least correlated (most dissimilar) candidate comes first.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientFeaturesError,
    UndefinedCorrelationError,
)
from .normalize import NormalizedPanel, as_panel
from .panel import FeaturePanel


@dataclass(frozen=True)
class CorrelationReport:
    """Per-candidate Pearson coefficient against the self.

    ``ordering`` lists candidates ascending by r, most dissimilar
    first.  ``basis`` records whether normalized or raw values fed the
    computation.
    """

    self_id: str
    entities: tuple[str, ...]
    r: dict[str, float]
    ordering: tuple[str, ...]
    basis: str

    def most_dissimilar(self) -> str:
        return self.ordering[0]

    def most_similar(self) -> str:
        return self.ordering[-1]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("entity,r\n")
        for entity in self.ordering:
            out.write(f"{entity},{self.r[entity]!r}\n")
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "self": self.self_id,
            "basis": self.basis,
            "r": {e: self.r[e] for e in self.entities},
            "ordering": list(self.ordering),
        }


def average_feature_vector(
    panel: NormalizedPanel | FeaturePanel, entity: str
) -> np.ndarray:
    """Mean over years of each of the entity's features."""
    p = as_panel(panel)
    return p.values[p.entity_index(entity)].mean(axis=0)


def pearson(a, b) -> float:
    """Pearson product-moment coefficient, clamped to [-1, 1].

    Requires equal lengths of at least 2; a constant vector on either
    side leaves the coefficient undefined and raises.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
        raise InsufficientFeaturesError(
            f"expected equal-length vectors, got sizes {a.size} and {b.size}"
        )
    if a.size < 2:
        raise InsufficientFeaturesError(
            f"need at least 2 features, got {a.size}"
        )
    da = a - a.mean()
    db = b - b.mean()
    var_a = float(np.sum(da * da))
    var_b = float(np.sum(db * db))
    if var_a == 0.0 or var_b == 0.0:
        raise UndefinedCorrelationError(
            "correlation is undefined for a constant vector"
        )
    r = float(np.sum(da * db)) / float(np.sqrt(var_a) * np.sqrt(var_b))
    return min(1.0, max(-1.0, r))


def correlation_report(
    panel: NormalizedPanel | FeaturePanel, self_id: str
) -> CorrelationReport:
    """Correlate every other entity's averaged vector with the self's.

    Candidates are ordered ascending by r; ties keep panel order.  The
    report's basis records whether the panel held normalized or raw
    values.
    """
    basis = "normalized" if isinstance(panel, NormalizedPanel) else "raw"
    p = as_panel(panel)
    self_vector = average_feature_vector(p, self_id)
    candidates = tuple(e for e in p.entities if e != self_id)
    r = {e: pearson(self_vector, average_feature_vector(p, e)) for e in candidates}
    ordering = tuple(sorted(candidates, key=lambda e: r[e]))
    return CorrelationReport(
        self_id=self_id, entities=candidates, r=r, ordering=ordering, basis=basis
    )
