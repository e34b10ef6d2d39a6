"""Synthetic panel generator with one planted outlier.

Produces a panel where every candidate except one tracks the self's
trajectory closely (small multiplicative noise) and a single
designated outlier both dwarfs the self's per-feature ranges and grows
in the opposite direction.  The outlier is therefore far from the
self's accepted-detector signature under the distance measure and
anti-aligned under the angle measure, which is what makes it a usable
end-to-end test target.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError
from .panel import FeaturePanel

DEFAULT_SELF_ID = "SELF"
DEFAULT_OUTLIER_ID = "TGT"

# Decoys wiggle around the self's series by at most this fraction.
_NOISE = 0.05
# Per-year relative climb of the self's trend (outlier runs it backwards).
_TREND = 0.6
# Magnitude gap between the outlier and the crowd.
_OUTLIER_SCALE = 10.0


def generate_panel(
    entities: int = 8,
    features: int = 18,
    years: int = 4,
    seed: int = 0,
    self_id: str = DEFAULT_SELF_ID,
    outlier_id: str = DEFAULT_OUTLIER_ID,
    first_year: int = 2005,
) -> FeaturePanel:
    """Build the planted-outlier fixture.

    ``entities`` counts the self as well, so entities = 8 yields one
    self, six decoys, and the outlier.  Identical arguments produce an
    identical panel.  The outlier is listed last, so a rank-1 finish
    can never be an artifact of tie-breaking by panel order.
    """
    if entities < 3:
        raise InvalidParameterError(
            f"need at least 3 entities (self, decoy, outlier), got {entities}"
        )
    if features < 1:
        raise InvalidParameterError(f"need at least 1 feature, got {features}")
    if years < 2:
        raise InvalidParameterError(
            f"need at least 2 years for growth rates, got {years}"
        )
    if self_id == outlier_id:
        raise InvalidParameterError("self and outlier identifiers must differ")

    rng = np.random.default_rng(seed)
    t = np.arange(years) / (years - 1)

    # one base magnitude per feature, spread over three decades
    base = 10.0 ** rng.uniform(1.0, 4.0, features)
    up = 1.0 + _TREND * t
    down = 1.0 + _TREND * (1.0 - t)

    def wiggle() -> np.ndarray:
        return 1.0 + rng.uniform(-_NOISE, _NOISE, (years, features))

    decoy_ids = tuple(f"C{i:02d}" for i in range(1, entities - 1))
    ids = (self_id, *decoy_ids, outlier_id)

    values = np.empty((entities, years, features))
    values[0] = base[None, :] * up[:, None] * wiggle()
    for i in range(1, entities - 1):
        values[i] = values[0] * wiggle()
    values[entities - 1] = (
        _OUTLIER_SCALE * base[None, :] * down[:, None] * wiggle()
    )

    return FeaturePanel(
        entities=ids,
        years=tuple(range(first_year, first_year + years)),
        features=tuple(f"f{j:02d}" for j in range(1, features + 1)),
        values=values,
    )
