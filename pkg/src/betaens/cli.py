"""Command-line client for sampling, moment checks, distance estimation,
CLT harnesses, and regime scans.

The CLI is a thin client over the HTTP service: by default it runs the
service in-process; ``--server URL`` targets a remote instance instead.
Exit codes: 0 success, 2 parameter validation failure, 1 internal failure.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import sys

import httpx

__all__ = ["main", "build_parser"]

_TIMEOUT = 600.0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betaens",
        description=(
            "Bidiagonal samplers, spectral-statistic checks, and Monte Carlo "
            "distance estimates for scaled unit-interval vs half-line eigenvalue ensembles."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")
        p.add_argument("--server", default=None, help="remote service URL (default: in-process)")

    def add_params(p: argparse.ArgumentParser, a2_required: bool) -> None:
        p.add_argument("--beta", type=float, required=True, help="repulsion exponent (> 0)")
        p.add_argument("--m", type=int, required=True, help="spectrum size")
        p.add_argument("--a1", type=float, required=True, help="first weight exponent")
        p.add_argument(
            "--a2", type=float, required=a2_required, default=None, help="second weight exponent"
        )

    def add_seed(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, required=True, help="root seed (64-bit unsigned)")

    p = sub.add_parser("sample", help="draw eigenvalue spectra")
    p.add_argument(
        "--ensemble",
        choices=("laguerre", "jacobi", "jacobi-scaled"),
        required=True,
        help="which spectrum to draw",
    )
    add_params(p, a2_required=False)
    p.add_argument("--n", type=int, required=True, help="number of draws")
    add_seed(p)
    add_output_flags(p)

    p = sub.add_parser("moments", help="closed-form spectral statistics")
    add_params(p, a2_required=False)
    add_output_flags(p)

    p = sub.add_parser("distance", help="Monte Carlo distance estimates")
    p.add_argument("--metric", choices=("tv", "kl"), required=True, help="distance to estimate")
    add_params(p, a2_required=True)
    p.add_argument("--n", type=int, required=True, help="Monte Carlo sample size")
    add_seed(p)
    p.add_argument("--shards", type=int, default=1, help="deterministic shard count")
    add_output_flags(p)

    p = sub.add_parser("clt", help="normal-limit verification harness")
    p.add_argument("--regime", choices=("A2", "A3"), required=True, help="parameter regime")
    p.add_argument(
        "--statistic",
        choices=("u", "log-ratio", "quadratic"),
        default="u",
        help="which centered statistic to test",
    )
    add_params(p, a2_required=True)
    p.add_argument("--replicates", type=int, required=True, help="number of replicates")
    add_seed(p)
    add_output_flags(p)

    p = sub.add_parser("scan", help="run an estimator along a parameter schedule")
    p.add_argument(
        "--kind", choices=("A1", "A2", "A3", "vanishing"), required=True, help="schedule kind"
    )
    p.add_argument("--steps", type=int, required=True, help="number of schedule points (>= 3)")
    p.add_argument("--a2-low", type=float, required=True, dest="a2_low", help="smallest a2 (> 1000)")
    p.add_argument("--a2-high", type=float, required=True, dest="a2_high", help="largest a2")
    p.add_argument("--beta", type=float, required=True, help="repulsion exponent (> 0)")
    p.add_argument("--rho", type=float, default=None, help="A1 rate a1/a2")
    p.add_argument("--sigma", type=float, default=None, help="A2 rate a1*m/a2")
    p.add_argument("--x", type=float, default=None, help="A3 rate a1/sqrt(a2)")
    p.add_argument("--y", type=float, default=None, help="A3 rate m/sqrt(a2)")
    p.add_argument("--m", type=int, default=None, help="fixed spectrum size (vanishing)")
    p.add_argument("--a1", type=float, default=None, help="fixed first exponent (vanishing)")
    p.add_argument("--metric", choices=("tv", "kl", "clt"), required=True, help="what to run per point")
    p.add_argument("--n", type=int, required=True, help="samples (tv/kl) or replicates (clt) per point")
    add_seed(p)
    p.add_argument("--shards", type=int, default=1, help="deterministic shard count")
    add_output_flags(p)

    return parser


def _build_request(args: argparse.Namespace) -> tuple[str, dict]:
    def params_payload() -> dict:
        payload = {"beta": args.beta, "m": args.m, "a1": args.a1}
        if args.a2 is not None:
            payload["a2"] = args.a2
        return payload

    if args.command == "sample":
        return "/sample", {
            "ensemble": args.ensemble,
            **params_payload(),
            "n": args.n,
            "seed": args.seed,
        }
    if args.command == "moments":
        return "/moments", params_payload()
    if args.command == "distance":
        return "/distance", {
            "metric": args.metric,
            **params_payload(),
            "n": args.n,
            "seed": args.seed,
            "shards": args.shards,
        }
    if args.command == "clt":
        return "/clt", {
            "regime": args.regime,
            "statistic": args.statistic,
            **params_payload(),
            "replicates": args.replicates,
            "seed": args.seed,
        }
    payload = {
        "kind": args.kind,
        "steps": args.steps,
        "a2_low": args.a2_low,
        "a2_high": args.a2_high,
        "beta": args.beta,
        "metric": args.metric,
        "n": args.n,
        "seed": args.seed,
        "shards": args.shards,
    }
    for knob in ("rho", "sigma", "x", "y", "m", "a1"):
        value = getattr(args, knob)
        if value is not None:
            payload[knob] = value
    return "/scan", payload


def _post(path: str, payload: dict, server: str | None) -> httpx.Response:
    if server is not None:
        with httpx.Client(base_url=server, timeout=_TIMEOUT) as client:
            return client.post(path, json=payload)

    async def run_in_process() -> httpx.Response:
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://betaens.internal", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(run_in_process())


def _describe_detail(detail) -> str:
    if isinstance(detail, str):
        return detail
    if isinstance(detail, list):
        parts = []
        for item in detail:
            loc = ".".join(str(piece) for piece in item.get("loc", ()) if piece != "body")
            msg = item.get("msg", "invalid value")
            parts.append(f"{loc}: {msg}" if loc else msg)
        return "; ".join(parts)
    return json.dumps(detail)


def _flatten(obj: dict, prefix: str = "") -> dict:
    flat: dict = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, prefix=f"{name}_"))
        else:
            flat[name] = value
    return flat


def _render_csv(command: str, data: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if command == "sample":
        width = int(data["params"]["m"])
        writer.writerow(["draw"] + [f"eig{j}" for j in range(1, width + 1)])
        for index, row in enumerate(data["draws"]):
            writer.writerow([index] + list(row))
    elif command == "scan":
        rows = []
        for index, point in enumerate(data["points"]):
            flat = {"point": index}
            flat.update(_flatten(point))
            rows.append(flat)
        header: list[str] = []
        for row in rows:
            for key in row:
                if key not in header:
                    header.append(key)
        writer.writerow(header)
        for row in rows:
            writer.writerow([row.get(key) for key in header])
    else:
        flat = _flatten(data)
        writer.writerow(list(flat))
        writer.writerow(list(flat.values()))
    return buffer.getvalue()


def _render(command: str, data: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    return _render_csv(command, data)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    path, payload = _build_request(args)
    try:
        response = _post(path, payload, args.server)
    except httpx.HTTPError as exc:
        print(f"error: service request failed: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - surface internal failures as exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if response.status_code == 200:
        _emit(_render(args.command, response.json(), args.format), args.out)
        return 0
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    message = _describe_detail(detail)
    if response.status_code in (400, 422):
        print(f"error: {message}", file=sys.stderr)
        return 2
    print(f"error: internal failure: {message}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
