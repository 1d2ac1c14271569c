"""Command-line interface: batch experiments, summaries, scenario files, serving."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import PathprefError


def _cmd_run(args) -> int:
    from .experiments import ExperimentConfig, run_batch

    doc = json.loads(Path(args.config).read_text())
    cfg = ExperimentConfig.from_dict(doc)
    if args.seed is not None:
        cfg.master_seed = args.seed
    n = run_batch(cfg, args.out, jobs=args.jobs, progress=True)
    print(f"wrote {n} rows to {args.out}")
    return 0


def _cmd_summarize(args) -> int:
    from .experiments import read_batch_csv, summarize

    rows = read_batch_csv(args.input)
    report = summarize(rows)
    text = json.dumps(report, indent=1)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote report to {args.out}")
    else:
        print(text)
    return 0


def _cmd_make_scenario(args) -> int:
    from .scenarios import build_prm_scenario, preset_scenario, PrmScenarioConfig, save_scenario

    if args.preset:
        scenario = preset_scenario(args.preset)
    else:
        scenario = build_prm_scenario(
            PrmScenarioConfig(
                width=args.width,
                height=args.height,
                n_vertices=args.vertices,
                k_neighbors=args.k,
                n_constraints=args.constraints,
                seed=args.seed,
                name=f"prm-{args.seed}",
            )
        )
    save_scenario(scenario, args.out)
    print(f"wrote scenario '{scenario.name}' to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(journal_dir=args.journal_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="pathpref")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a batch experiment to CSV")
    p_run.add_argument("--config", required=True, help="experiment config JSON file")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.add_argument("--seed", type=int, default=None, help="override master seed")
    p_run.add_argument("--jobs", type=int, default=1, help="worker threads")
    p_run.set_defaults(func=_cmd_run)

    p_sum = sub.add_parser("summarize", help="summarize a batch CSV")
    p_sum.add_argument("--in", dest="input", required=True, help="input CSV path")
    p_sum.add_argument("--out", default=None, help="output JSON path (default stdout)")
    p_sum.set_defaults(func=_cmd_summarize)

    p_mk = sub.add_parser("make-scenario", help="write a scenario file")
    p_mk.add_argument("--preset", default=None, help="preset name (spec-A/B/C)")
    p_mk.add_argument("--out", required=True)
    p_mk.add_argument("--vertices", type=int, default=400)
    p_mk.add_argument("--k", type=int, default=10)
    p_mk.add_argument("--constraints", type=int, default=20)
    p_mk.add_argument("--width", type=float, default=100.0)
    p_mk.add_argument("--height", type=float, default=100.0)
    p_mk.add_argument("--seed", type=int, default=0)
    p_mk.set_defaults(func=_cmd_make_scenario)

    p_srv = sub.add_parser("serve", help="run the session HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--journal-dir", default=None)
    p_srv.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PathprefError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
