"""Request and response bodies for the HTTP service.

Schemas check types and structure only; semantic rules (parameter
ranges, panel integrity, entity lookup) live in the domain layer, so
every violation surfaces as one consistent 400 diagnostic rather than
being split between two validators.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    panel_csv: str
    self_id: str
    n: float = 0.45
    trials: int = 1000
    seed: int
    u_mode: str = "uniform"
    u_scope: str = "per-feature"
    growth_basis: str = "normalized"
    norm_scope: str = "per-entity"
    measures: list[str] = Field(default=["euclidean", "cosine"])
    mask_mode: str = "zero-include"
    workers: int = 1


class RunResponse(BaseModel):
    report: dict
    rank_csvs: dict[str, str]


class DetectRequest(BaseModel):
    panel_csv: str
    self_id: str
    n: float = 0.45
    growth_basis: str = "normalized"
    norm_scope: str = "per-entity"


class DetectResponse(BaseModel):
    snapshot: dict


class SynthRequest(BaseModel):
    entities: int = 8
    features: int = 18
    years: int = 4
    seed: int = 0
    self_id: str = "SELF"
    outlier_id: str = "TGT"
    first_year: int = 2005


class SynthResponse(BaseModel):
    panel_csv: str


class BaselineRequest(BaseModel):
    panel_csv: str
    self_id: str
    basis: str = "normalized"
    norm_scope: str = "per-entity"


class BaselineResponse(BaseModel):
    report: dict
    csv: str


class HealthResponse(BaseModel):
    status: str
    tool: str
    version: str


class ErrorResponse(BaseModel):
    error: str
    detail: str
