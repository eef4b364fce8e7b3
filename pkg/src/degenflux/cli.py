"""Command-line client for the service.

Every verb posts to the in-process service and writes the response to
plain files, so the CLI stays a thin transport layer: all validation
and numerics live behind the endpoints. Exit codes: 0 on success, 2 for
configuration or usage errors (including request validation), 3 for
runtime failures.

Verbs and their outputs (in the output directory):
    forward         forward.csv (x,t,u,v)
    measure         measurement.csv (t,side,du,dv)
    scan-stability  scan_t{t}.csv (a,D) and scan_t{t}_summary.json per time
    reconstruct     reconstruction.json and trace.csv
    noise-study     noise_study.csv (percent,cost,iterations,a_c)
    selftest        console report only

--config accepts a filesystem path or the name of a bundled experiment
(test1 .. test6, scan).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_config_dict(ref: str) -> dict:
    if os.path.exists(ref):
        try:
            with open(ref, "rb") as fh:
                return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise _CliError(EXIT_CONFIG, f"config {ref}: {exc}")
    name = ref if ref.endswith(".cfg") else f"{ref}.cfg"
    try:
        bundle = resources.files("degenflux.configs").joinpath(name)
        text = bundle.read_text()
    except (FileNotFoundError, ModuleNotFoundError):
        raise _CliError(EXIT_CONFIG, f"config not found: {ref}")
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise _CliError(EXIT_CONFIG, f"bundled config {name}: {exc}")


def _post(client, path: str, body: dict) -> dict:
    resp = client.post(path, json=body)
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    code = EXIT_CONFIG if resp.status_code < 500 else EXIT_RUNTIME
    raise _CliError(code, f"{path} failed ({resp.status_code}): {detail}")


def _out_dir(args, config: dict) -> str:
    out = args.out or config.get("output", {}).get("dir", ".")
    os.makedirs(out, exist_ok=True)
    return out


def _prepare(args) -> dict:
    config = _load_config_dict(args.config)
    if args.seed is not None:
        config.setdefault("measurement", {})["seed"] = args.seed
    return config


def _cmd_forward(client, args) -> int:
    config = _prepare(args)
    data = _post(client, "/forward", {"config": config, "nx": args.nx})
    out = _out_dir(args, config)
    path = os.path.join(out, "forward.csv")
    with open(path, "w") as fh:
        fh.write("x,t,u,v\n")
        for it, t in enumerate(data["ts"]):
            for ix, x in enumerate(data["xs"]):
                fh.write(
                    f"{x:.17g},{t:.17g},{data['u'][it][ix]:.17g},{data['v'][it][ix]:.17g}\n"
                )
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_measure(client, args) -> int:
    config = _prepare(args)
    data = _post(client, "/measure", {"config": config})
    out = _out_dir(args, config)
    path = os.path.join(out, "measurement.csv")
    with open(path, "w") as fh:
        fh.write("t,side,du,dv\n")
        for s in data["samples"]:
            fh.write(f"{s['t']:.17g},{s['side']},{s['du']:.17g},{s['dv']:.17g}\n")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_scan(client, args) -> int:
    config = _prepare(args)
    body = {
        "config": config,
        "threads": args.threads,
        "a_min": args.tau,
        "a_max": args.gamma,
        "count": args.grid,
    }
    data = _post(client, "/scan-stability", body)
    out = _out_dir(args, config)
    for scan in data["scans"]:
        tag = f"{scan['t']:g}"
        csv_path = os.path.join(out, f"scan_t{tag}.csv")
        with open(csv_path, "w") as fh:
            fh.write("a,D\n")
            for a, d in zip(scan["a_values"], scan["d_values"]):
                fh.write(f"{a:.17g},{d:.17g}\n")
        json_path = os.path.join(out, f"scan_t{tag}_summary.json")
        with open(json_path, "w") as fh:
            json.dump(scan["summary"], fh, indent=2)
            fh.write("\n")
        print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def _cmd_reconstruct(client, args) -> int:
    config = _prepare(args)
    data = _post(client, "/reconstruct", {"config": config})
    out = _out_dir(args, config)
    result = data["result"]
    json_path = os.path.join(out, "reconstruction.json")
    with open(json_path, "w") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    trace_path = os.path.join(out, "trace.csv")
    nparams = len(result["params"])
    with open(trace_path, "w") as fh:
        cols = ",".join(f"p{i}" for i in range(nparams))
        fh.write(f"eval,cost,{cols}\n")
        for row in result.get("trace", []):
            ps = ",".join(f"{p:.17g}" for p in row["params"])
            fh.write(f"{row['eval']},{row['cost']:.17g},{ps}\n")
    print(f"wrote {json_path} and {trace_path}")
    print(
        f"kind={result['kind']} params={result['params']} cost={result['cost']:.3e} "
        f"iterations={result['iterations']} status={result['status']}"
    )
    return EXIT_OK


def _cmd_noise_study(client, args) -> int:
    config = _prepare(args)
    data = _post(client, "/noise-study", {"config": config, "threads": args.threads})
    out = _out_dir(args, config)
    path = os.path.join(out, "noise_study.csv")
    with open(path, "w") as fh:
        fh.write("percent,cost,iterations,a_c\n")
        for row in data["rows"]:
            fh.write(
                f"{row['percent']:.17g},{row['cost']:.17g},{row['iterations']},{row['a_c']:.17g}\n"
            )
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_selftest(client, args) -> int:
    data = _post(client, "/selftest", {"inject_zero_fault": bool(args.inject_zero_fault)})
    for check in data["checks"]:
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"{mark} {check['name']}: {check['detail']}")
    print(f"selftest {'passed' if data['passed'] else 'failed'} in {data['elapsed']:.1f}s")
    return EXIT_OK if data["passed"] else EXIT_RUNTIME


_COMMANDS = {
    "forward": _cmd_forward,
    "measure": _cmd_measure,
    "scan-stability": _cmd_scan,
    "reconstruct": _cmd_reconstruct,
    "noise-study": _cmd_noise_study,
    "selftest": _cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degenflux",
        description="Degenerate-diffusion boundary-flux toolkit",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in _COMMANDS:
        sp = sub.add_parser(verb)
        if verb != "selftest":
            sp.add_argument("--config", required=True, help="config path or bundled name")
        sp.add_argument("--out", default=None, help="output directory (default from config)")
        sp.add_argument("--seed", type=int, default=None, help="override measurement seed")
        sp.add_argument("--threads", type=int, default=1, help="worker threads where supported")
        if verb == "selftest":
            sp.add_argument(
                "--inject-zero-fault",
                action="store_true",
                help="corrupt a zero table copy to prove the checks catch it",
            )
        if verb == "scan-stability":
            sp.add_argument("--tau", type=float, default=0.1, help="scan interval lower end")
            sp.add_argument("--gamma", type=float, default=0.8, help="scan interval upper end")
            sp.add_argument("--grid", type=int, default=141, help="scan grid points")
        if verb == "forward":
            sp.add_argument("--nx", type=int, default=101, help="spatial grid size")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from starlette.testclient import TestClient

    from .service import app

    try:
        with TestClient(app, raise_server_exceptions=False) as client:
            return _COMMANDS[args.verb](client, args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
