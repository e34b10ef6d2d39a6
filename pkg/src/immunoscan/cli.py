"""Command-line client for the screening service.

Subcommands run against an in-process service instance by default, so
no server needs to be running; `--server` (or IMMUNOSCAN_SERVER)
points them at a remote instance instead.  Flag validation errors exit
2; panel or parameter problems reported by the service exit 1.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import httpx

from ._version import __version__
from .detector import GROWTH_BASES
from .monitor import COSINE, EUCLIDEAN, MASK_MODES
from .normalize import SCOPES
from .trials import MAX_SEED, U_MODES, U_SCOPES

SEED_ENV = "IMMUNOSCAN_SEED"
SERVER_ENV = "IMMUNOSCAN_SERVER"

MEASURE_CHOICES = (EUCLIDEAN, COSINE, "both")


def _measure_list(choice: str) -> list[str]:
    if choice == "both":
        return [EUCLIDEAN, COSINE]
    return [choice]


def _post(server: str | None, path: str, payload: dict) -> httpx.Response:
    """POST to a remote server, or to an in-process app when none is set."""
    if server:
        with httpx.Client(base_url=server, timeout=300.0) as client:
            return client.post(path, json=payload)

    from .service import create_app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://immunoscan.local"
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _call(server: str | None, path: str, payload: dict) -> dict:
    try:
        response = _post(server, path, payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        raise SystemExit(1) from None
    if response.status_code != 200:
        try:
            body = response.json()
            detail = f"{body.get('error', 'error')}: {body.get('detail', '')}"
        except ValueError:
            detail = response.text
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(1)
    return response.json()


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(1) from None


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(1) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        _write_text(Path(out), text)
    else:
        sys.stdout.write(text)


def _seed_value(parser: argparse.ArgumentParser, seed: int | None) -> int:
    """Resolve the seed from the flag or the environment fallback."""
    if seed is None:
        raw = os.environ.get(SEED_ENV)
        if raw is None:
            parser.error(f"--seed is required (or set {SEED_ENV})")
        try:
            seed = int(raw)
        except ValueError:
            parser.error(f"{SEED_ENV} must be an integer, got {raw!r}")
    if not 0 <= seed <= MAX_SEED:
        parser.error(f"seed must be in [0, {MAX_SEED}], got {seed}")
    return seed


def _add_server_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--server",
        default=None,
        help=f"service base URL (default: in-process; env {SERVER_ENV})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="immunoscan",
        description="Rank takeover candidates by dissimilarity to an "
        "acquirer's outlier signature.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser(
        "run", help="full pipeline: normalize, trial ranking, baseline"
    )
    run.add_argument("--panel", required=True, help="panel CSV path")
    run.add_argument("--self", dest="self_id", required=True, metavar="ENTITY")
    run.add_argument("--n", type=float, default=0.45, help="detector span index")
    run.add_argument("--trials", type=int, default=1000)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--u-mode", choices=U_MODES, default="uniform")
    run.add_argument("--u-scope", choices=U_SCOPES, default="per-feature")
    run.add_argument("--growth-basis", choices=GROWTH_BASES, default="normalized")
    run.add_argument("--norm-scope", choices=SCOPES, default="per-entity")
    run.add_argument("--measure", choices=MEASURE_CHOICES, default="both")
    run.add_argument("--mask-mode", choices=MASK_MODES, default="zero-include")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", required=True, help="report JSON path")
    _add_server_flag(run)

    detect = commands.add_parser(
        "detect", help="detector intervals and masked self at zero uncertainty"
    )
    detect.add_argument("--panel", required=True)
    detect.add_argument("--self", dest="self_id", required=True, metavar="ENTITY")
    detect.add_argument("--n", type=float, default=0.45)
    detect.add_argument("--growth-basis", choices=GROWTH_BASES, default="normalized")
    detect.add_argument("--norm-scope", choices=SCOPES, default="per-entity")
    detect.add_argument("--out", default=None, help="snapshot JSON path (default stdout)")
    _add_server_flag(detect)

    synth = commands.add_parser(
        "synth", help="generate a planted-outlier synthetic panel"
    )
    synth.add_argument("--entities", type=int, default=8, help="count incl. self")
    synth.add_argument("--features", type=int, default=18)
    synth.add_argument("--years", type=int, default=4)
    synth.add_argument("--outlier", default="TGT", help="planted outlier id")
    synth.add_argument("--self-id", default="SELF")
    synth.add_argument("--first-year", type=int, default=2005)
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--out", default=None, help="panel CSV path (default stdout)")
    _add_server_flag(synth)

    baseline = commands.add_parser(
        "baseline", help="Pearson correlation of year-averaged features"
    )
    baseline.add_argument("--panel", required=True)
    baseline.add_argument("--self", dest="self_id", required=True, metavar="ENTITY")
    baseline.add_argument(
        "--basis", choices=("normalized", "raw"), default="normalized"
    )
    baseline.add_argument("--norm-scope", choices=SCOPES, default="per-entity")
    baseline.add_argument("--out", default=None, help="CSV path (default stdout)")
    _add_server_flag(baseline)

    serve = commands.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _validate_run_flags(parser: argparse.ArgumentParser, args) -> None:
    if args.n < 0:
        parser.error(f"--n must be >= 0, got {args.n}")
    if args.trials < 1:
        parser.error(f"--trials must be >= 1, got {args.trials}")
    if args.workers < 1:
        parser.error(f"--workers must be >= 1, got {args.workers}")


def _server(args) -> str | None:
    server = getattr(args, "server", None)
    return server or os.environ.get(SERVER_ENV) or None


def cmd_run(parser: argparse.ArgumentParser, args) -> int:
    _validate_run_flags(parser, args)
    seed = _seed_value(parser, args.seed)
    payload = {
        "panel_csv": _read_text(args.panel),
        "self_id": args.self_id,
        "n": args.n,
        "trials": args.trials,
        "seed": seed,
        "u_mode": args.u_mode,
        "u_scope": args.u_scope,
        "growth_basis": args.growth_basis,
        "norm_scope": args.norm_scope,
        "measures": _measure_list(args.measure),
        "mask_mode": args.mask_mode,
        "workers": args.workers,
    }
    result = _call(_server(args), "/run", payload)

    out = Path(args.out)
    _write_text(out, json.dumps(result["report"], indent=2) + "\n")
    written = [str(out)]
    for measure, csv_text in result["rank_csvs"].items():
        rank_path = out.parent / f"ranks_{measure}.csv"
        _write_text(rank_path, csv_text)
        written.append(str(rank_path))
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_detect(parser: argparse.ArgumentParser, args) -> int:
    if args.n < 0:
        parser.error(f"--n must be >= 0, got {args.n}")
    payload = {
        "panel_csv": _read_text(args.panel),
        "self_id": args.self_id,
        "n": args.n,
        "growth_basis": args.growth_basis,
        "norm_scope": args.norm_scope,
    }
    result = _call(_server(args), "/detect", payload)
    _emit(json.dumps(result["snapshot"], indent=2) + "\n", args.out)
    return 0


def cmd_synth(parser: argparse.ArgumentParser, args) -> int:
    if args.entities < 3:
        parser.error(f"--entities must be >= 3, got {args.entities}")
    if args.features < 1:
        parser.error(f"--features must be >= 1, got {args.features}")
    if args.years < 2:
        parser.error(f"--years must be >= 2, got {args.years}")
    seed = _seed_value(parser, args.seed)
    payload = {
        "entities": args.entities,
        "features": args.features,
        "years": args.years,
        "seed": seed,
        "self_id": args.self_id,
        "outlier_id": args.outlier,
        "first_year": args.first_year,
    }
    result = _call(_server(args), "/synth", payload)
    _emit(result["panel_csv"], args.out)
    return 0


def cmd_baseline(parser: argparse.ArgumentParser, args) -> int:
    payload = {
        "panel_csv": _read_text(args.panel),
        "self_id": args.self_id,
        "basis": args.basis,
        "norm_scope": args.norm_scope,
    }
    result = _call(_server(args), "/baseline", payload)
    _emit(result["csv"], args.out)
    return 0


def cmd_serve(parser: argparse.ArgumentParser, args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


_HANDLERS = {
    "run": cmd_run,
    "detect": cmd_detect,
    "synth": cmd_synth,
    "baseline": cmd_baseline,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return _HANDLERS[args.command](parser, args)


if __name__ == "__main__":
    raise SystemExit(main())
