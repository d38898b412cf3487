"""Command-line front end: a thin client over the HTTP service.

Every subcommand builds a JSON request and posts it to the service; by
default an in-process instance of the app handles the call, so no server
is needed, while --server redirects the same requests to a remote one.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path


class ClientError(Exception):
    """Service-reported failure (HTTP 4xx/5xx) or unreachable server."""


class ServiceClient:
    def __init__(self, server: str | None):
        import httpx

        if server:
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            from .service import app

            # the in-process transport is an implementation detail; keep
            # its import-time deprecation chatter off the user's stderr
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        import httpx

        try:
            response = self._client.post(path, json=payload)
        except httpx.HTTPError as err:
            raise ClientError(f"service unreachable: {err}") from err
        if response.status_code != 200:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ClientError(f"{path} failed ({response.status_code}): {detail}")
        return response.json()


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _load_weights(text: str) -> list:
    if text.startswith("@"):
        try:
            return [float(v) for v in json.loads(Path(text[1:]).read_text())]
        except (OSError, ValueError, TypeError) as err:
            raise argparse.ArgumentTypeError(
                f"cannot read weights from {text[1:]!r}: {err}"
            )
    return _float_list(text)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("LOGO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ClientError(f"LOGO_THREADS is not an integer: {env!r}")
    return 1


def _emit(args, text: str, summary: str | None = None):
    """Write the payload to --out or stdout; keep the summary visible."""
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
        if summary:
            print(summary)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        if summary:
            print(summary, file=sys.stderr)


def _load_precision(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _add_out(sub, required: bool = False):
    sub.add_argument("--out", "--output", "-o", dest="out", required=required,
                     help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logo",
        description="Sparse Gaussian graphical models from information filtering networks",
    )
    parser.add_argument("--server", help="service URL (default: run in-process)")
    commands = parser.add_subparsers(dest="command", metavar="command")

    est = commands.add_parser("estimate", help="fit a precision model from CSV observations")
    est.add_argument("--input", "-i", required=True, help="observation CSV")
    est.add_argument("--method", default="tmfg",
                     choices=["tmfg", "mst", "dense", "null", "ridge"])
    est.add_argument("--standardize", action="store_true",
                     help="rescale columns to unit variance before fitting")
    est.add_argument("--seed", type=int, default=0, help="fold seed for ridge")
    _add_out(est)

    lik = commands.add_parser("likelihood", help="score a fitted model on held-out CSV data")
    lik.add_argument("--model", required=True, help="precision JSON file")
    lik.add_argument("--test", required=True, help="test observation CSV")
    _add_out(lik)

    bench = commands.add_parser("benchmark", help="run a Monte Carlo model comparison sweep")
    bench.add_argument("--generator", default="factor", choices=["factor", "csv"])
    bench.add_argument("--p", type=int, default=300, help="variables per sample")
    bench.add_argument("--factors", type=int, default=3)
    bench.add_argument("--loading-scale", type=float, default=1.0)
    bench.add_argument("--noise-variance", type=float, default=1.0)
    bench.add_argument("--input", help="observation CSV (csv generator)")
    bench.add_argument("--mode", default="shuffled", choices=["shuffled", "sequential"],
                       help="window protocol for csv data")
    bench.add_argument("--standardize", action=argparse.BooleanOptionalAction,
                       default=None,
                       help="unit-variance columns (default: on for factor, off for csv)")
    bench.add_argument("--q", type=_int_list, required=True,
                       help="comma-separated window lengths")
    bench.add_argument("--samples", type=int, default=100)
    bench.add_argument("--models", default="tmfg,mst,dense,null,ridge,max",
                       help="comma-separated model names")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--threads", type=int, default=None,
                       help="worker threads (or LOGO_THREADS)")
    bench.add_argument("--no-timing", action="store_true",
                       help="report zero seconds for byte-reproducible output")
    _add_out(bench)

    pred = commands.add_parser("predict", help="conditional mean of future variables given past values")
    pred.add_argument("--model", required=True)
    pred.add_argument("--past", type=_int_list, required=True)
    pred.add_argument("--future", type=_int_list, required=True)
    pred.add_argument("--x", type=_float_list, required=True,
                      help="observed values for the past variables")
    _add_out(pred)

    cond = commands.add_parser("condition", help="conditional distribution under linear constraints")
    cond.add_argument("--model", required=True)
    cond.add_argument("--scenario", required=True,
                      help='JSON file: {"A": [[...]], "z": [...]} or {"weights": [...], "loss": L}')
    _add_out(cond)

    alloc = commands.add_parser("allocate", help="allocate a portfolio loss across variables")
    alloc.add_argument("--model", required=True)
    alloc.add_argument("--weights", type=_load_weights, required=True,
                       help="comma-separated holdings, or @file.json")
    alloc.add_argument("--loss", type=float, required=True)
    _add_out(alloc)

    samp = commands.add_parser("sample", help="draw synthetic observations from a fitted model")
    samp.add_argument("--model", required=True)
    samp.add_argument("--n", type=int, required=True)
    samp.add_argument("--seed", type=int, default=0)
    _add_out(samp)

    graph = commands.add_parser("graph-export", help="export the dependency graph")
    graph.add_argument("--model", help="precision JSON with clique-tree structure")
    graph.add_argument("--input", "-i", help="observation CSV to fit a structure from")
    graph.add_argument("--method", default="tmfg", choices=["tmfg", "mst"])
    graph.add_argument("--standardize", action="store_true")
    graph.add_argument("--format", default="json", choices=["json", "edges"])
    _add_out(graph)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_estimate(client, args) -> int:
    payload = {
        "csv": Path(args.input).read_text(),
        "method": args.method,
        "standardize": args.standardize,
        "seed": args.seed,
    }
    data = client.post("/estimate", payload)
    summary = f"{args.method}: {data['n_edges']} edges"
    if data.get("n_cliques") is not None:
        summary += f", {data['n_cliques']} cliques, {data['n_separators']} separators"
    _emit(args, json.dumps(data["precision"], indent=2), summary)
    return 0


def _cmd_likelihood(client, args) -> int:
    payload = {
        "precision": _load_precision(args.model),
        "test_csv": Path(args.test).read_text(),
    }
    data = client.post("/likelihood", payload)
    _emit(args, json.dumps(data, indent=2))
    return 0


def _cmd_benchmark(client, args) -> int:
    if args.generator == "factor":
        generator = {
            "type": "factor",
            "p": args.p,
            "n_factors": args.factors,
            "loading_scale": args.loading_scale,
            "noise_variance": args.noise_variance,
            "standardize": True if args.standardize is None else args.standardize,
        }
    else:
        if not args.input:
            raise ClientError("--input is required with --generator csv")
        generator = {
            "type": "csv",
            "path": args.input,
            "mode": args.mode,
            "standardize": False if args.standardize is None else args.standardize,
        }
    payload = {
        "generator": generator,
        "p_subset": args.p,
        "q_list": args.q,
        "n_samples": args.samples,
        "models": [m.strip() for m in args.models.split(",") if m.strip()],
        "seed": args.seed,
        "measure_time": not args.no_timing,
        "workers": _threads(args),
    }
    data = client.post("/benchmark", payload)
    _emit(args, data["report_csv"])
    return 0


def _cmd_predict(client, args) -> int:
    payload = {
        "precision": _load_precision(args.model),
        "past": args.past,
        "future": args.future,
        "x1": args.x,
    }
    data = client.post("/predict", payload)
    _emit(args, json.dumps(data, indent=2))
    return 0


def _cmd_condition(client, args) -> int:
    payload = {
        "precision": _load_precision(args.model),
        "scenario": json.loads(Path(args.scenario).read_text()),
    }
    data = client.post("/condition", payload)
    _emit(args, json.dumps(data, indent=2))
    return 0


def _cmd_allocate(client, args) -> int:
    payload = {
        "precision": _load_precision(args.model),
        "weights": args.weights,
        "loss": args.loss,
    }
    data = client.post("/allocate", payload)
    _emit(args, json.dumps(data, indent=2))
    return 0


def _cmd_sample(client, args) -> int:
    payload = {
        "precision": _load_precision(args.model),
        "n": args.n,
        "seed": args.seed,
    }
    data = client.post("/sample", payload)
    _emit(args, data["csv"])
    return 0


def _cmd_graph_export(client, args) -> int:
    if bool(args.model) == bool(args.input):
        raise ClientError("provide exactly one of --model or --input")
    payload = {"format": args.format, "method": args.method,
               "standardize": args.standardize}
    if args.model:
        payload["precision"] = _load_precision(args.model)
    else:
        payload["csv"] = Path(args.input).read_text()
    data = client.post("/graph-export", payload)
    if args.format == "json":
        _emit(args, json.dumps(data["structure"], indent=2))
    else:
        _emit(args, data["edges"])
    return 0


_DISPATCH = {
    "estimate": _cmd_estimate,
    "likelihood": _cmd_likelihood,
    "benchmark": _cmd_benchmark,
    "predict": _cmd_predict,
    "condition": _cmd_condition,
    "allocate": _cmd_allocate,
    "sample": _cmd_sample,
    "graph-export": _cmd_graph_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        client = ServiceClient(args.server)
        return _DISPATCH[args.command](client, args)
    except (ClientError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
