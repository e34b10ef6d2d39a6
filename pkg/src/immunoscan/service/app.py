"""FastAPI application wiring the screening pipeline to HTTP.

Domain failures (bad panels, unknown entities, invalid parameters)
return 400 with a machine-readable error name; malformed request
bodies return FastAPI's standard 422.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .._version import __version__
from ..baseline import correlation_report
from ..errors import ImmunoscanError, InvalidParameterError
from ..normalize import normalize_minmax
from ..panel import parse_panel_csv, serialize_panel_csv
from ..pipeline import TOOL_NAME, detect_snapshot, run_analysis
from ..synth import generate_panel
from ..trials import TrialConfig
from .schemas import (
    BaselineRequest,
    BaselineResponse,
    DetectRequest,
    DetectResponse,
    HealthResponse,
    RunRequest,
    RunResponse,
    SynthRequest,
    SynthResponse,
)

BASELINE_BASES = ("normalized", "raw")


def create_app() -> FastAPI:
    app = FastAPI(title=TOOL_NAME, version=__version__)

    @app.exception_handler(ImmunoscanError)
    async def domain_error(request: Request, exc: ImmunoscanError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", tool=TOOL_NAME, version=__version__)

    @app.post("/run", response_model=RunResponse)
    async def run(body: RunRequest) -> RunResponse:
        config = TrialConfig(
            n=body.n,
            trials=body.trials,
            seed=body.seed,
            u_mode=body.u_mode,
            u_scope=body.u_scope,
            growth_basis=body.growth_basis,
            norm_scope=body.norm_scope,
            measures=tuple(body.measures),
            mask_mode=body.mask_mode,
        )
        result = run_analysis(
            body.panel_csv, body.self_id, config, workers=body.workers
        )
        return RunResponse(report=result.report, rank_csvs=result.rank_csvs())

    @app.post("/detect", response_model=DetectResponse)
    async def detect(body: DetectRequest) -> DetectResponse:
        snapshot = detect_snapshot(
            body.panel_csv,
            body.self_id,
            n=body.n,
            growth_basis=body.growth_basis,
            norm_scope=body.norm_scope,
        )
        return DetectResponse(snapshot=snapshot)

    @app.post("/synth", response_model=SynthResponse)
    async def synth(body: SynthRequest) -> SynthResponse:
        panel = generate_panel(
            entities=body.entities,
            features=body.features,
            years=body.years,
            seed=body.seed,
            self_id=body.self_id,
            outlier_id=body.outlier_id,
            first_year=body.first_year,
        )
        return SynthResponse(panel_csv=serialize_panel_csv(panel))

    @app.post("/baseline", response_model=BaselineResponse)
    async def baseline(body: BaselineRequest) -> BaselineResponse:
        if body.basis not in BASELINE_BASES:
            raise InvalidParameterError(
                f"basis must be one of {BASELINE_BASES}, got {body.basis!r}"
            )
        panel = parse_panel_csv(body.panel_csv)
        source = (
            normalize_minmax(panel, body.norm_scope)
            if body.basis == "normalized"
            else panel
        )
        report = correlation_report(source, body.self_id)
        return BaselineResponse(report=report.to_dict(), csv=report.to_csv())

    return app
