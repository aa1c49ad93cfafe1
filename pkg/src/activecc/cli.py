"""Command-line entry points: instance generation, experiment runs, the
labeling-session server, and the acceptance checks."""

from __future__ import annotations

import argparse
import sys

from .graph_io import write_planted
from .harness import ExperimentConfig, rows_to_csv_text, run_experiment, write_rows_csv
from .oracle import generate_planted


def _cmd_generate(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    instance = generate_planted(sizes, args.p, args.seed)
    write_planted(instance, args.out, args.sidecar)
    print(f"wrote {args.out}: n={instance.n}, k={instance.k}, "
          f"edges={instance.graph.edge_count()}")
    return 0


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    if args.out is not None:
        config = ExperimentConfig(**{**config.__dict__, "output": args.out})
    rows = run_experiment(config)
    if config.output:
        print(f"wrote {config.output} ({len(rows)} rows)")
    else:
        sys.stdout.write(rows_to_csv_text(rows))
    flagged = [r for r in rows if r.flag]
    for r in flagged:
        print(f"note: budget {r.budget} seed {r.seed}: {r.flag} "
              f"(first round used {r.distinct_queries} queries)", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .session import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _cmd_check(args) -> int:
    from .acceptance import run_all

    results = run_all(verbose=True)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="activecc")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a planted instance as JSONL")
    gen.add_argument("--sizes", required=True, help="comma-separated cluster sizes")
    gen.add_argument("--p", type=float, required=True, help="pair-label flip probability")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="graph JSONL path")
    gen.add_argument("--sidecar", default=None, help="optional truth sidecar path")
    gen.set_defaults(func=_cmd_generate)

    run = sub.add_parser("run", help="run a budgeted experiment from a JSON config")
    run.add_argument("--config", required=True, help="experiment config JSON path")
    run.add_argument("--out", default=None, help="override the CSV output path")
    run.set_defaults(func=_cmd_run)

    serve = sub.add_parser("serve", help="start the labeling-session HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    check = sub.add_parser("check", help="run the acceptance suite")
    check.set_defaults(func=_cmd_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
