"""Command-line front end.

The CLI is a thin client of the evaluation service: every subcommand builds
a JSON request, sends it through an HTTP client (in-process against the
bundled app by default, or to a remote instance via --server), and renders
the JSON response.  Numeric values in human-readable output and in --json
output come from the same response body.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # In-process mode: drive the bundled ASGI app through the sync test
    # client, so the CLI exercises the same request path as a remote call.
    import warnings

    with warnings.catch_warnings():
        # starlette warns about the httpx version pairing on some installs
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service.app import app  # imported lazily; pulls in numpy/scipy

    return TestClient(app, raise_server_exceptions=False)


class ClientError(SystemExit):
    pass


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code >= 400:
        try:
            body = response.json()
        except ValueError:
            body = {"error": response.text, "kind": "config"}
        kind = body.get("kind", "config")
        code = {"config": EXIT_CONFIG, "data": EXIT_DATA,
                "numeric": EXIT_NUMERIC}.get(kind, EXIT_CONFIG)
        print(f"error ({kind}): {body.get('error', 'request failed')}",
              file=sys.stderr)
        raise SystemExit(code)
    return response.json()


def _parse_distances(text: str) -> dict:
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            "expected d_out,d_x,d_z,d_m (four comma-separated integers)"
        )
    return {"d_out": parts[0], "d_x": parts[1], "d_z": parts[2], "d_m": parts[3]}


def _scheme_payload(args) -> dict:
    payload = {"scheme": args.scheme, **args.d, "p": args.p, "ry": args.ry}
    payload["r_y"] = payload.pop("ry")
    for attr, key in (
        ("dcult", "d_cult"), ("nm", "n_m"), ("cgap", "c_gap"),
        ("tintv", "t_intv"), ("tidle", "t_idle"), ("qcult", "q_cult"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            payload[key] = value
    return payload


def _emit(args, data: dict, human: str) -> None:
    text = json.dumps(data, indent=2) if args.json else human
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def cmd_cost(args, client) -> int:
    data = _post(client, "/cost", _scheme_payload(args))
    human = (
        f"{data['scheme']}: space {data['space']} qubits, "
        f"time {data['time']:g} steps "
        f"(ancilla {data['d_h']}x{data['d_v']}, {data['n_m_side']}/side)"
    )
    _emit(args, data, human)
    return EXIT_OK


def cmd_infidelity(args, client) -> int:
    payload = {"params": _scheme_payload(args), "seed": args.seed}
    if args.grow_table:
        payload["grow_table_csv"] = Path(args.grow_table).read_text()
    if args.ansatz:
        payload["ansatz_json"] = Path(args.ansatz).read_text()
    data = _post(client, "/infidelity", payload)
    human = "\n".join([
        f"{data['scheme']} at p={data['p']:g}, r_y={data['r_y']:g}:",
        f"  q_dist   exact {data['q_dist_exact']:.4e}   "
        f"analytic {data['q_dist_analytic']:.4e}",
        f"  1-q_succ exact {1 - data['q_succ']:.4e}   "
        f"analytic {1 - data['q_succ_analytic']:.4e}",
        f"  space {data['space']}  time {data['time']:g}  "
        f"effective {data['effective_spacetime']:.4e}",
    ])
    _emit(args, data, human)
    return EXIT_OK


def cmd_sweep(args, client) -> int:
    payload = {
        "scheme": args.scheme,
        "d_out": args.dout, "d_x": args.dx, "d_z": args.dz, "d_m": args.dm,
        "p": args.p, "r_y": args.ry,
    }
    for attr, key in (("dcult", "d_cult"), ("nm", "n_m"), ("cgap", "c_gap"),
                      ("tintv", "t_intv"), ("tidle", "t_idle")):
        value = getattr(args, attr, None)
        if value is not None:
            payload[key] = value
    data = _post(client, "/sweep", payload)
    reports = sorted(data["reports"], key=lambda r: r["scheme"])
    rows = ["scheme,p,r_y,q_dist,q_succ,space,time,effective_spacetime,frontier"]
    frontier = {r["scheme"] for r in data["frontier"]}
    for r in reports:
        rows.append(
            f"{r['scheme']},{r['p']},{r['r_y']},{r['q_dist_exact']},"
            f"{r['q_succ']},{r['space']},{r['time']},"
            f"{r['effective_spacetime']},{int(r['scheme'] in frontier)}"
        )
    csv_text = "\n".join(rows)
    if args.plot_out:
        # infidelity-versus-cost plot data, one series per scheme variant
        plot = ["x,y,series"] + [
            f"{r['q_dist_exact']},{r['effective_spacetime']},"
            f"{r['scheme'].split('-')[0]}"
            for r in reports
        ]
        Path(args.plot_out).write_text("\n".join(plot) + "\n")
    if args.json:
        _emit(args, data, csv_text)
    elif args.out:
        Path(args.out).write_text(csv_text + "\n")
    else:
        print(csv_text)
    return EXIT_OK


def cmd_verify_layout(args, client) -> int:
    payload = {**args.d, "combined_prestages": args.prestages}
    if args.schedule:
        payload["schedule"] = json.loads(Path(args.schedule).read_text())
    data = _post(client, "/verify-layout", payload)
    if data["distance_preserving"]:
        human = "distance-preserving: yes"
    else:
        lines = ["distance-preserving: NO"]
        for v in data["pairing_violations"]:
            lines.append(f"  pairing ({v['item']}): {v['detail']}")
        grouped: dict[tuple, int] = {}
        for v in data["layout_violations"]:
            key = (v["stage"], v["patch_index"], v["required"],
                   v["available"], bool(v.get("informational")))
            grouped[key] = grouped.get(key, 0) + 1
        for (stage, patch, req, avail, info), count in sorted(grouped.items()):
            tag = " [informational]" if info else ""
            times = f" ({count} string classes)" if count > 1 else ""
            lines.append(
                f"  layout stage {stage} patch {patch}: "
                f"needs {req}, has {avail}{tag}{times}"
            )
        human = "\n".join(lines)
    _emit(args, data, human)
    return EXIT_OK


def cmd_schedules(args, client) -> int:
    data = _post(client, "/schedules",
                 {"length": args.length, "count_only": args.count})
    human = str(data["count"]) if args.count else "\n".join(data["schedules"])
    _emit(args, data, human)
    return EXIT_OK


def cmd_cycle_sim(args, client) -> int:
    payload = {
        "n_m": args.nm, "d_m": args.dm, "d_cult": args.dcult,
        "seed": args.seed, "n_stages": args.stages,
    }
    for attr, key in (("p", "p"), ("tcult", "t_cult"),
                      ("qsucc", "q_cult_succ"), ("pacc", "p_acc"),
                      ("cgap", "c_gap")):
        value = getattr(args, attr, None)
        if value is not None:
            payload[key] = value
    data = _post(client, "/cycle-sim", payload)
    human = (
        f"T_m {data['t_m']}  "
        f"T_intv {data['t_intv_mean']:.2f} +- {data['t_intv_stderr']:.2f}  "
        f"T_idle {data['t_idle_mean']:.2f} +- {data['t_idle_stderr']:.2f}  "
        f"({data['stages']} stages)"
    )
    _emit(args, data, human)
    return EXIT_OK


def cmd_fit(args, client) -> int:
    payload = {
        "samples_csv": Path(args.samples).read_text(),
        "model": args.model,
        "loocv": args.loocv,
    }
    data = _post(client, "/fit", payload)
    if args.loocv:
        lines = [f"best model: {data['model']}"]
        for s in data["loocv_scores"]:
            flag = " (disqualified)" if s["disqualified"] else ""
            lines.append(f"  {s['model']:14s} {s['score']:.4f}{flag}")
        human = "\n".join(lines)
    else:
        human = "\n".join([f"model: {data['model']}",
                           f"residual: {data['residual_norm']:.4e}",
                           json.dumps(data["params"], indent=2)])
    _emit(args, data, human)
    return EXIT_OK


def cmd_serve(args, client) -> int:  # pragma: no cover - thin uvicorn wrapper
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _add_scheme_args(sub, combined=True):
    sub.add_argument("--scheme", choices=("sng", "cmb"), default="sng")
    sub.add_argument("--d", type=_parse_distances, required=True,
                     metavar="D_OUT,D_X,D_Z,D_M")
    sub.add_argument("--p", type=float, default=1e-3)
    sub.add_argument("--ry", type=float, default=0.1)
    if combined:
        sub.add_argument("--dcult", type=int)
        sub.add_argument("--nm", type=int)
        sub.add_argument("--cgap", type=float)
        sub.add_argument("--tintv", type=float)
        sub.add_argument("--tidle", type=float)
        sub.add_argument("--qcult", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msdforge",
        description="Magic state distillation evaluation for 2D color codes",
    )
    parser.add_argument("--server", help="base URL of a running service "
                        "(default: run requests in-process)")
    parser.add_argument("--json", action="store_true",
                        help="emit raw JSON responses")
    parser.add_argument("--out", help="write output to a file")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cost", help="space/time resource costs")
    _add_scheme_args(s)
    s.set_defaults(func=cmd_cost)

    s = sub.add_parser("infidelity", help="output infidelity and success rate")
    _add_scheme_args(s)
    s.add_argument("--grow-table", help="CSV of growing rates")
    s.add_argument("--ansatz", help="JSON of ansatz parameters to use")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_infidelity)

    s = sub.add_parser("sweep", help="Pareto sweep over parameter ranges")
    s.add_argument("--scheme", choices=("sng", "cmb"), default="sng")
    for name in ("dout", "dx", "dz", "dm"):
        s.add_argument(f"--{name}", type=int, nargs="+", required=True)
    s.add_argument("--p", type=float, default=1e-3)
    s.add_argument("--ry", type=float, default=0.1)
    s.add_argument("--dcult", type=int)
    s.add_argument("--nm", type=int)
    s.add_argument("--cgap", type=float)
    s.add_argument("--tintv", type=float)
    s.add_argument("--tidle", type=float)
    s.add_argument("--plot-out", help="write x,y,series plot data CSV")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify-layout", help="distance-preservation checks")
    s.add_argument("--d", type=_parse_distances, required=True,
                   metavar="D_OUT,D_X,D_Z,D_M")
    s.add_argument("--schedule", help="JSON file of 8 [P,Q] label pairs")
    s.add_argument("--prestages", action="store_true",
                   help="also report combined-scheme pre-stage findings")
    s.set_defaults(func=cmd_verify_layout)

    s = sub.add_parser("schedules", help="enumerate valid gate schedules")
    s.add_argument("--length", type=int, default=7)
    s.add_argument("--count", action="store_true")
    s.set_defaults(func=cmd_schedules)

    s = sub.add_parser("cycle-sim", help="magic-state preparation cycle")
    s.add_argument("--nm", type=int, required=True)
    s.add_argument("--dm", type=int, required=True)
    s.add_argument("--dcult", type=int, required=True)
    s.add_argument("--p", type=float)
    s.add_argument("--tcult", type=int)
    s.add_argument("--qsucc", type=float)
    s.add_argument("--pacc", type=float)
    s.add_argument("--cgap", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stages", type=int, default=1000)
    s.set_defaults(func=cmd_cycle_sim)

    s = sub.add_parser("fit", help="fit the failure-rate ansatz")
    s.add_argument("--samples", required=True, help="CSV of p,d,failures,shots")
    s.add_argument("--model", default="scaled-power")
    s.add_argument("--loocv", action="store_true")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args, None)
    with _client(args.server) as client:
        return args.func(args, client)


if __name__ == "__main__":
    sys.exit(main())
