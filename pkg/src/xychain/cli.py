"""Command-line client.

Runs in-process by default; with --server it posts the same JSON config
document to a running service instance and writes the returned CSV, so local
and remote invocations produce identical files.

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, ConsistencyError, IntegrationError


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="xychain",
        description="Driven anisotropic XY spin chain: magnetization, spin "
                    "correlators and nearest-neighbor concurrence.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_tol=True):
        p.add_argument("--config", help="JSON config document (may name a preset)")
        p.add_argument("--preset", help="preset name (overrides the config's preset)")
        p.add_argument("--output", help="output CSV path (defaults to the config's "
                                        "output_path, else stdout)")
        p.add_argument("--threads", type=int, default=1, help="parallelism cap")
        if with_tol:
            p.add_argument("--tol", type=float, help="integrator unitarity tolerance")
        p.add_argument("--server", help="base URL of a running service; the run is "
                                        "delegated over HTTP")

    p_run = sub.add_parser("run", help="time series of M, Sx, Sy, Sz, C")
    common(p_run)
    p_sweep = sub.add_parser("sweep", help="asymptotic C over a swept parameter")
    common(p_sweep)
    p_verify = sub.add_parser("verify", help="oracle-equivalence verification")
    p_verify.add_argument("--max-n", type=int, default=8, dest="max_n")
    p_verify.add_argument("--threads", type=int, default=None)
    p_verify.add_argument("--server", help="base URL of a running service")
    p_presets = sub.add_parser("presets", help="list presets or dump one as JSON")
    p_presets.add_argument("--preset", help="dump this preset's full config")
    p_serve = sub.add_parser("serve", help="launch the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_document(args) -> dict:
    doc = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
    if args.preset:
        doc["preset"] = args.preset
    if getattr(args, "tol", None) is not None:
        doc["tol"] = args.tol
    if not doc:
        raise ConfigError("nothing to run: pass --config and/or --preset")
    return doc


def _write_output(csv_text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)


def _remote_post(server: str, path: str, payload: dict, client=None, timeout=3600.0):
    import httpx

    own = client is None
    if own:
        client = httpx.Client(base_url=server, timeout=timeout)
    try:
        resp = client.post(path, json=payload)
    finally:
        if own:
            client.close()
    if resp.status_code >= 400:
        try:
            detail = resp.json()
        except ValueError:
            detail = {"message": resp.text}
        code = detail.get("code", 1 if resp.status_code < 500 else 2)
        raise _RemoteError(int(code), str(detail.get("message", detail)))
    return resp.json()


class _RemoteError(RuntimeError):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _cmd_run(args, client=None) -> int:
    doc = _load_document(args)
    if args.server:
        payload = _remote_post(args.server, "/run", doc, client=client)
        csv_text = payload["csv"]
        out_path = args.output or doc.get("output_path")
    else:
        from .presets import expand_config
        from .runner import run_timeseries

        cfg = expand_config(doc, "run")
        res = run_timeseries(cfg)
        csv_text = res.to_csv()
        out_path = args.output or cfg.output_path
    _write_output(csv_text, out_path)
    return 0


def _cmd_sweep(args, client=None) -> int:
    doc = _load_document(args)
    if args.server:
        payload = _remote_post(args.server, f"/sweep?threads={args.threads}", doc,
                               client=client)
        csv_text = payload["csv"]
        out_path = args.output or doc.get("output_path")
    else:
        from .presets import expand_config
        from .runner import run_sweep

        cfg = expand_config(doc, "sweep")
        res = run_sweep(cfg, threads=args.threads)
        csv_text = res.to_csv()
        out_path = args.output or cfg.base.output_path
    _write_output(csv_text, out_path)
    return 0


def _cmd_verify(args, client=None) -> int:
    if args.server:
        payload = _remote_post(args.server, "/verify",
                               {"max_n": args.max_n, "threads": args.threads or 1},
                               client=client)
        print(payload["report"])
        return 0 if payload["passed"] else 3
    from .verify import run_verification

    report = run_verification(max_n=args.max_n, threads=args.threads)
    print(report.text)
    return 0 if report.passed else 3


def _cmd_presets(args) -> int:
    from .presets import PRESETS, preset_infos

    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}")
        print(json.dumps(PRESETS[args.preset]["config"], indent=2))
        return 0
    for info in preset_infos():
        print(f"{info.name:12s} {info.kind:5s} {info.description}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None, client=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, client=client)
        if args.command == "sweep":
            return _cmd_sweep(args, client=client)
        if args.command == "verify":
            return _cmd_verify(args, client=client)
        if args.command == "presets":
            return _cmd_presets(args)
        return _cmd_serve(args)
    except _RemoteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, ConsistencyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
