"""End-to-end orchestration: parse, normalize, screen, report.

run_analysis drives the whole pipeline (ingestion, normalization,
Monte Carlo ranking, correlation baseline) and assembles a
JSON-ready report whose config echo, together with the input file,
reproduces the run bit for bit.  detect_snapshot stops after masking
with zero uncertainty, as an inspection aid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .baseline import correlation_report
from .detector import apply_mask, detector_ranges, feature_stats
from .normalize import NormalizedPanel, normalize_minmax
from .panel import FeaturePanel, PanelSplit, parse_panel_csv, split_self_nonself
from .trials import RankFrequencyTable, TrialConfig, run_trials, summarize

TOOL_NAME = "immunoscan"


@dataclass(frozen=True)
class RunResult:
    """A completed run: the JSON-ready report plus rich table objects."""

    report: dict
    tables: dict[str, RankFrequencyTable]

    def rank_csvs(self) -> dict[str, str]:
        return {m: t.to_csv() for m, t in self.tables.items()}


def _as_parsed(panel: FeaturePanel | str) -> FeaturePanel:
    if isinstance(panel, FeaturePanel):
        return panel
    return parse_panel_csv(panel)


def _split_normalized(
    norm: NormalizedPanel, self_id: str
) -> PanelSplit:
    return split_self_nonself(norm.panel, self_id)


def _snapshot(stats, ranges, accepted, years) -> dict:
    return {
        "u": 0.0,
        "features": list(stats.features),
        "years": list(years),
        "mean": stats.mean.tolist(),
        "std": stats.std.tolist(),
        "growth": stats.growth.tolist(),
        "lower": ranges.lower.tolist(),
        "upper": ranges.upper.tolist(),
        "kept_mask": accepted.mask.tolist(),
        "accepted": accepted.matrix.tolist(),
    }


def run_analysis(
    panel: FeaturePanel | str,
    self_id: str,
    config: TrialConfig,
    workers: int = 1,
) -> RunResult:
    """Run the full screening pipeline for one acquirer.

    ``panel`` is a parsed panel or long-CSV text covering the self and
    every candidate.  The report echoes the config and the panel's
    content digest; identical (panel, self_id, config) give identical
    reports and rank tables for any ``workers`` value.
    """
    raw = _as_parsed(panel)
    digest = raw.content_digest()
    norm = normalize_minmax(raw, config.norm_scope)
    split = _split_normalized(norm, self_id)
    raw_self = raw.entity_slice(self_id)

    stats = feature_stats(split.self_panel, raw_self, config.growth_basis)
    zero_u = np.zeros(len(stats.features))
    ranges = detector_ranges(stats, config.n, zero_u)
    accepted = apply_mask(split.self_panel.values[0], ranges)

    tables = run_trials(config, split, raw_self, workers)
    summaries = {m: summarize(t) for m, t in tables.items()}
    baseline = correlation_report(norm, self_id)

    report = {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "config": {
            "self": self_id,
            "panel_digest": digest,
            **config.to_dict(),
        },
        "warnings": {
            "normalization": list(norm.warnings),
            "growth": list(stats.warnings),
            "span_advisories": list(ranges.warnings),
        },
        "detectors": _snapshot(stats, ranges, accepted, split.self_panel.years),
        "rank_tables": {
            m: {
                "entities": list(t.entities),
                "trials": t.trials,
                "counts": t.counts.tolist(),
            }
            for m, t in tables.items()
        },
        "summaries": {
            m: {
                entity: {
                    "modal_rank": s.per_entity[entity].modal_rank,
                    "top1_share": s.per_entity[entity].top1_share,
                    "mean_rank": s.per_entity[entity].mean_rank,
                }
                for entity in s.entities
            }
            for m, s in summaries.items()
        },
        "baseline": baseline.to_dict(),
    }
    return RunResult(report=report, tables=tables)


def detect_snapshot(
    panel: FeaturePanel | str,
    self_id: str,
    n: float,
    growth_basis: str = "normalized",
    norm_scope: str = "per-entity",
) -> dict:
    """Detector intervals and accepted-detector matrix at zero uncertainty.

    Runs ingestion, normalization, and masking only; no trials, no
    baseline.  The returned mapping is JSON-ready.
    """
    raw = _as_parsed(panel)
    norm = normalize_minmax(raw, norm_scope)
    split = _split_normalized(norm, self_id)
    raw_self = raw.entity_slice(self_id)

    stats = feature_stats(split.self_panel, raw_self, growth_basis)
    ranges = detector_ranges(stats, n, np.zeros(len(stats.features)))
    accepted = apply_mask(split.self_panel.values[0], ranges)

    return {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "self": self_id,
        "panel_digest": raw.content_digest(),
        "n": float(n),
        "growth_basis": growth_basis,
        "norm_scope": norm_scope,
        "warnings": {
            "normalization": list(norm.warnings),
            "growth": list(stats.warnings),
            "span_advisories": list(ranges.warnings),
        },
        "detectors": _snapshot(stats, ranges, accepted, split.self_panel.years),
    }
