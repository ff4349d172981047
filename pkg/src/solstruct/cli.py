"""Command-line front end.

Subcommands mirror the library's stages: extract a program's dependency
graph, generate a dataset, validate a dataset's ground truth, summarize a
run, and score benchmark responses.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import SolstructError, UndefinedNameError
from . import bench, evalcore, graphx, pipeline, qc
from . import solgrammar as sg


def _cmd_extract(args) -> int:
    with open(args.program, encoding="utf-8") as fh:
        program = sg.parse_program(fh.read())
    graph = graphx.build_graph(program)
    if args.json:
        payload = graphx.to_json(graph)
        if args.json == "-":
            print(payload)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
    else:
        print(graphx.format_text(graph))
        print(f"steps: {sg.count_steps(program)}")
    return 0


def _cmd_generate(args) -> int:
    if args.config:
        cfg = pipeline.RunConfig.from_json_file(args.config)
    else:
        cfg = pipeline.RunConfig()
    if args.dataset:
        cfg.dataset = args.dataset
    if args.out_dir:
        cfg.out_dir = args.out_dir
    if args.rounds is not None:
        cfg.rounds = args.rounds
    if args.repeats is not None:
        cfg.repeats = args.repeats
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.live:
        cfg.mock = False
    if not cfg.dataset:
        print("error: no dataset (use --dataset or a config file)", file=sys.stderr)
        return 2
    result = pipeline.run_full(cfg)
    print(
        f"kept {len(result.records)} records "
        f"({result.stats['questions']} questions), "
        f"{len(result.rejections)} rejections"
    )
    if result.dataset_path:
        print(f"dataset: {result.dataset_path}")
        print(f"rejections: {result.rejections_path}")
        print(f"stats: {result.stats_path}")
    return 0


def _cmd_validate(args) -> int:
    records = pipeline.read_records(args.dataset)
    failures = 0
    for rec in records:
        try:
            program = sg.parse_program(rec.program_source)
            trace = evalcore.evaluate(program)
            local = qc.local_check(program, tol=args.tol, trace=trace)
            if not local.passed:
                raise SolstructError(local.cause or "annotation mismatch")
            executed = sg.format_value(trace.result)
            if not bench.answers_equal(executed, rec.answer):
                raise SolstructError(f"answer {rec.answer} != executed {executed}")
        except (SolstructError, UndefinedNameError) as exc:
            failures += 1
            print(f"FAIL {rec.id}: {exc}")
        else:
            if not args.quiet:
                print(f"ok   {rec.id}")
    print(f"{len(records) - failures}/{len(records)} records verified")
    return 1 if failures else 0


def _cmd_stats(args) -> int:
    records = pipeline.read_records(args.dataset)
    rejections = []
    if args.rejections:
        with open(args.rejections, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    row = json.loads(line)
                    rejections.append(
                        pipeline.Rejection(
                            question_id=row.get("question_id", ""),
                            parent_id=row.get("parent_id"),
                            round=int(row.get("round", 0)),
                            repeat=int(row.get("repeat", 0)),
                            attempt=int(row.get("attempt", 0)),
                            gate=row.get("gate", ""),
                            cause=row.get("cause", ""),
                        )
                    )
    print(json.dumps(pipeline.emit_stats(records, rejections), indent=2))
    return 0


def _cmd_bench(args) -> int:
    records = [r.to_json_dict() for r in pipeline.read_records(args.dataset)]
    responses: dict[str, str] = {}
    with open(args.responses, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                row = json.loads(line)
                responses[str(row["id"])] = row["response"]
    report = bench.score(records, responses, rel_tol=args.rel_tol)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    print(report.format_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solstruct",
        description="Synthesize harder math word problems with executable ground truth.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="dependency graph of a solution program")
    p.add_argument("program", help="path to a solution program file")
    p.add_argument("--json", help="write graph JSON here ('-' for stdout)")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("generate", help="run the synthesis pipeline")
    p.add_argument("--config", help="RunConfig JSON file")
    p.add_argument("--dataset", help="seed problems JSONL")
    p.add_argument("--out-dir", help="output directory")
    p.add_argument("--rounds", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--live", action="store_true",
                   help="use the HTTP agent instead of the offline mock")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("validate", help="re-execute every record's ground truth")
    p.add_argument("dataset", help="dataset JSONL")
    p.add_argument("--tol", type=float, default=evalcore.DEFAULT_TOL)
    p.add_argument("--quiet", action="store_true", help="only print failures")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("stats", help="summarize a generated dataset")
    p.add_argument("dataset", help="dataset JSONL")
    p.add_argument("--rejections", help="rejections JSONL")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("bench", help="score model responses against a dataset")
    p.add_argument("--dataset", required=True, help="dataset JSONL")
    p.add_argument("--responses", required=True,
                   help="JSONL rows of {id, response}")
    p.add_argument("--rel-tol", type=float, default=bench.DEFAULT_REL_TOL)
    p.add_argument("--json", help="write the full report JSON here")
    p.add_argument("--csv", help="write per-row results CSV here")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SolstructError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
