"""Entity x year x feature panels: parsing, validation, and splitting.

The on-disk format is a long CSV with header ``entity,year,feature,value``
and one row per cell.  Panels are dense: every (entity, year, feature)
combination must be present exactly once.  Axis order is deterministic --
entities and features in first-appearance order, years ascending -- so
downstream tie-breaking and reports are reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .errors import (
    DuplicateCellError,
    EntityNotFoundError,
    IncompletePanelError,
    NoCandidatesError,
    PanelFormatError,
    PanelInvariantError,
)

CSV_HEADER = ("entity", "year", "feature", "value")


@dataclass(frozen=True)
class FeaturePanel:
    """Dense value tensor indexed (entity, year, feature), with labels.

    ``values`` has shape (len(entities), len(years), len(features)) and
    is read-only.  Years are strictly increasing; labels are unique;
    every value is finite.
    """

    entities: tuple[str, ...]
    years: tuple[int, ...]
    features: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        expected = (len(self.entities), len(self.years), len(self.features))
        if arr.shape != expected:
            raise PanelInvariantError(
                f"values shape {arr.shape} does not match axes {expected}"
            )
        if len(set(self.entities)) != len(self.entities):
            raise PanelInvariantError("entity identifiers must be unique")
        if len(set(self.features)) != len(self.features):
            raise PanelInvariantError("feature names must be unique")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise PanelInvariantError("years must be strictly increasing")
        if not np.all(np.isfinite(arr)):
            raise PanelInvariantError("all values must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "features", tuple(self.features))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def entity_index(self, entity: str) -> int:
        try:
            return self.entities.index(entity)
        except ValueError:
            raise EntityNotFoundError(f"entity not found: {entity!r}") from None

    def entity_slice(self, entity: str) -> "FeaturePanel":
        """Single-entity panel holding this entity's values."""
        idx = self.entity_index(entity)
        return FeaturePanel(
            entities=(entity,),
            years=self.years,
            features=self.features,
            values=self.values[idx : idx + 1],
        )

    def content_digest(self) -> str:
        """SHA-256 over the canonical CSV serialization."""
        text = serialize_panel_csv(self)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class PanelSplit:
    """One self panel (single entity) plus the remaining candidates."""

    self_panel: FeaturePanel
    nonself_panel: FeaturePanel

    def __post_init__(self):
        if len(self.self_panel.entities) != 1:
            raise PanelInvariantError("self panel must hold exactly one entity")
        if self.self_panel.entities[0] in self.nonself_panel.entities:
            raise PanelInvariantError("self entity appears among candidates")
        if (
            self.self_panel.years != self.nonself_panel.years
            or self.self_panel.features != self.nonself_panel.features
        ):
            raise PanelInvariantError("split panels must share year/feature axes")

    @property
    def self_id(self) -> str:
        return self.self_panel.entities[0]


def _parse_value(text: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise PanelFormatError(f"value is not numeric: {text!r}", line=line) from None
    if not math.isfinite(value):
        raise PanelFormatError(f"value is not finite: {text!r}", line=line)
    return value


def parse_panel_csv(source: str | IO[str]) -> FeaturePanel:
    """Read a long-format panel CSV into a dense FeaturePanel.

    ``source`` is a text stream or a string of CSV content.  Raises
    PanelFormatError (with line number) on a malformed header or row,
    DuplicateCellError on a repeated cell, and IncompletePanelError
    when any combination is missing.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)

    try:
        header = next(reader)
    except StopIteration:
        raise PanelFormatError("empty input, expected header row", line=1) from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise PanelFormatError(
            f"header must be {','.join(CSV_HEADER)!r}, got {','.join(header)!r}",
            line=1,
        )

    cells: dict[tuple[str, int, str], float] = {}
    entities: list[str] = []
    entity_set: set[str] = set()
    features: list[str] = []
    feature_set: set[str] = set()
    years_seen: set[int] = set()

    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise PanelFormatError(
                f"expected 4 columns, got {len(row)}", line=line
            )
        entity, year_text, feature, value_text = row
        try:
            year = int(year_text)
        except ValueError:
            raise PanelFormatError(
                f"year is not an integer: {year_text!r}", line=line
            ) from None
        value = _parse_value(value_text, line)

        key = (entity, year, feature)
        if key in cells:
            raise DuplicateCellError(
                f"duplicate cell for entity={entity!r} year={year} "
                f"feature={feature!r}",
                line=line,
            )
        cells[key] = value
        if entity not in entity_set:
            entity_set.add(entity)
            entities.append(entity)
        if feature not in feature_set:
            feature_set.add(feature)
            features.append(feature)
        years_seen.add(year)

    if not cells:
        raise IncompletePanelError("no data rows")

    years = sorted(years_seen)
    values = np.empty((len(entities), len(years), len(features)), dtype=float)
    for ei, entity in enumerate(entities):
        for yi, year in enumerate(years):
            for fi, feature in enumerate(features):
                try:
                    values[ei, yi, fi] = cells[(entity, year, feature)]
                except KeyError:
                    raise IncompletePanelError(
                        f"missing cell: entity={entity!r} year={year} "
                        f"feature={feature!r}"
                    ) from None

    return FeaturePanel(
        entities=tuple(entities),
        years=tuple(years),
        features=tuple(features),
        values=values,
    )


def serialize_panel_csv(panel: FeaturePanel) -> str:
    """Canonical long-CSV text for a panel; inverse of parse_panel_csv.

    Rows are emitted entity-major, then year, then feature, matching the
    parser's axis-order rules so a round trip preserves the panel
    exactly.  Values use shortest round-trip float formatting.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for ei, entity in enumerate(panel.entities):
        for yi, year in enumerate(panel.years):
            for fi, feature in enumerate(panel.features):
                writer.writerow(
                    [entity, year, feature, repr(float(panel.values[ei, yi, fi]))]
                )
    return out.getvalue()


def split_self_nonself(panel: FeaturePanel, self_id: str) -> PanelSplit:
    """Partition a panel into the acquirer's slice and the candidates.

    Candidate entities keep their original order.  Raises
    EntityNotFoundError for an unknown ``self_id`` and NoCandidatesError
    when the panel holds only one entity.
    """
    idx = panel.entity_index(self_id)
    if len(panel.entities) < 2:
        raise NoCandidatesError(
            "panel holds a single entity, no candidates to rank"
        )
    keep = [i for i in range(len(panel.entities)) if i != idx]
    nonself = FeaturePanel(
        entities=tuple(panel.entities[i] for i in keep),
        years=panel.years,
        features=panel.features,
        values=panel.values[keep],
    )
    return PanelSplit(self_panel=panel.entity_slice(self_id), nonself_panel=nonself)


def panel_from_cells(
    cells: Iterable[tuple[str, int, str, float]]
) -> FeaturePanel:
    """Build a panel from (entity, year, feature, value) tuples.

    Convenience for tests and generators; applies the same axis-order
    and completeness rules as the CSV parser.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for entity, year, feature, value in cells:
        writer.writerow([entity, year, feature, repr(float(value))])
    return parse_panel_csv(out.getvalue())
