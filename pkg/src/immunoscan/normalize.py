"""Min-max scaling of panel values onto [0, 1].

Two scopes are supported.  ``per-entity`` takes each entity's own
min/max per feature across its years, which is the default; ``global``
pools every entity's years per feature, preserving scale differences
between the acquirer and the candidates.  A constant series has no
range and maps to 0.0, which is reported as a warning rather than an
error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .panel import FeaturePanel

PER_ENTITY = "per-entity"
GLOBAL = "global"
SCOPES = (PER_ENTITY, GLOBAL)


@dataclass(frozen=True)
class NormalizedPanel:
    """A panel of [0, 1] values plus how it was scaled.

    ``source_digest`` identifies the raw panel this was derived from;
    ``warnings`` lists constant (entity, feature) series that were
    pinned to 0.0.
    """

    panel: FeaturePanel
    scope: str
    source_digest: str
    warnings: tuple[str, ...] = field(default=())

    @property
    def entities(self) -> tuple[str, ...]:
        return self.panel.entities

    @property
    def years(self) -> tuple[int, ...]:
        return self.panel.years

    @property
    def features(self) -> tuple[str, ...]:
        return self.panel.features

    @property
    def values(self) -> np.ndarray:
        return self.panel.values

    def entity_slice(self, entity: str) -> "NormalizedPanel":
        return NormalizedPanel(
            panel=self.panel.entity_slice(entity),
            scope=self.scope,
            source_digest=self.source_digest,
            warnings=self.warnings,
        )


def as_panel(panel: FeaturePanel | NormalizedPanel) -> FeaturePanel:
    """Accept either a raw or a normalized panel and return the tensor."""
    if isinstance(panel, NormalizedPanel):
        return panel.panel
    return panel


def normalize_minmax(panel: FeaturePanel, scope: str = PER_ENTITY) -> NormalizedPanel:
    """Scale every value to (x - min) / (max - min) within its scope group.

    per-entity: min/max per (entity, feature) over that entity's years.
    global: min/max per feature over all entities and years.
    Constant groups (max == min) map to 0.0 and are listed in the
    result's warnings.
    """
    if scope not in SCOPES:
        raise InvalidParameterError(
            f"normalization scope must be one of {SCOPES}, got {scope!r}"
        )
    values = panel.values
    if scope == PER_ENTITY:
        lo = values.min(axis=1, keepdims=True)
        hi = values.max(axis=1, keepdims=True)
    else:
        lo = values.min(axis=(0, 1), keepdims=True)
        hi = values.max(axis=(0, 1), keepdims=True)

    span = hi - lo
    degenerate = span == 0.0
    safe_span = np.where(degenerate, 1.0, span)
    scaled = np.where(
        np.broadcast_to(degenerate, values.shape),
        0.0,
        (values - lo) / safe_span,
    )

    warnings: list[str] = []
    if scope == PER_ENTITY:
        flat = degenerate[:, 0, :]
        for ei, fi in zip(*np.nonzero(flat)):
            warnings.append(
                f"constant series normalized to 0.0: "
                f"entity={panel.entities[ei]!r} feature={panel.features[fi]!r}"
            )
    else:
        for fi in np.nonzero(degenerate[0, 0, :])[0]:
            warnings.append(
                f"constant series normalized to 0.0: "
                f"feature={panel.features[fi]!r} (all entities)"
            )

    normalized = FeaturePanel(
        entities=panel.entities,
        years=panel.years,
        features=panel.features,
        values=scaled,
    )
    return NormalizedPanel(
        panel=normalized,
        scope=scope,
        source_digest=panel.content_digest(),
        warnings=tuple(warnings),
    )
