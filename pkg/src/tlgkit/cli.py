"""Command-line entry points.

Subcommands mirror the pipeline stages: build the benchmark dataset,
build the fine-tuning corpus, run a backend over a dataset, score the
records, and render report tables. ``serve-mock`` runs the deterministic
test backend in the foreground.
"""

from __future__ import annotations

import argparse
import sys

from . import dataset, dmlt, mockserver, orchestrator, report
from .client import BackendConfig
from .errors import TlgkitError
from .metrics import ScoreReport, score
from .templates import builtin_templates, get_template, load_templates


def _add_build_tlg(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("build-tlg", help="sample questions into a benchmark dataset")
    p.add_argument("--questions", required=True, help="source file, one question per line")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_tlg)


def _cmd_build_tlg(args: argparse.Namespace) -> None:
    questions = dataset.load_questions(args.questions)
    entries = dataset.build_tlg(questions, n=args.n, seed=args.seed)
    dataset.save_tlg(entries, args.out)
    print(f"wrote {len(entries)} entries to {args.out}")


def _add_build_dmlt(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("build-dmlt", help="build the (x, mlt, y) fine-tuning corpus")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="FILE")
    p.add_argument("--cap", type=int, default=dmlt.DEFAULT_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shuffle", action="store_true", help="shuffle pairs before capping")
    p.add_argument("--out", required=True)
    p.add_argument("--histogram", help="also write the per-token histogram JSON")
    p.set_defaults(func=_cmd_build_dmlt)


def _cmd_build_dmlt(args: argparse.Namespace) -> None:
    pairs = dmlt.load_raw_pairs(args.inputs)
    triples, histogram = dmlt.build_dmlt(
        pairs, cap=args.cap, seed=args.seed, shuffle=args.shuffle
    )
    dmlt.save_triples(triples, args.out)
    if args.histogram:
        dmlt.save_histogram(histogram, args.histogram)
    print(f"wrote {len(triples)} triples to {args.out}")


_MODES = {
    "prompt": orchestrator.run_prompt_tlg,
    "forced": orchestrator.run_forced_mlt,
    "non-tlg": orchestrator.run_non_tlg,
    "multi": orchestrator.run_multi_mlt,
}


def _add_run(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("run", help="drive a backend over a dataset")
    p.add_argument("--mode", choices=sorted(_MODES), required=True)
    p.add_argument(
        "--dataset",
        required=True,
        help="TLG dataset file (prompt/forced) or question lines (non-tlg/multi)",
    )
    p.add_argument("--backend", required=True, help="backend config JSON file")
    p.add_argument("--template", required=True, help="chat template name")
    p.add_argument("--templates-file", help="extra template config file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)


def _cmd_run(args: argparse.Namespace) -> None:
    backend = BackendConfig.from_file(args.backend)
    extra = load_templates(args.templates_file) if args.templates_file else None
    template = get_template(args.template, extra)
    if args.mode in ("prompt", "forced"):
        data = dataset.load_tlg(args.dataset)
    else:
        data = dataset.load_questions(args.dataset)
    records = _MODES[args.mode](data, backend, template)
    orchestrator.save_records(records, args.out)
    failures = sum(1 for r in records if r.error)
    print(f"wrote {len(records)} records to {args.out} ({failures} failed)")


def _add_score(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("score", help="score a record file into a report")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True, help="score report JSON")
    p.add_argument("--csv", help="also write the flat per-target CSV")
    p.set_defaults(func=_cmd_score)


def _cmd_score(args: argparse.Namespace) -> None:
    records = orchestrator.load_records(args.records)
    result = score(orchestrator.records_to_items(records))
    result.save(args.out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(result.to_csv())
    cell = result.all_level
    print(f"all-level PM {cell.pm:.2f} FM {cell.fm:.2f} over {cell.n} records")


def _add_report(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("report", help="render the per-level comparison table")
    p.add_argument("--scores", required=True, help="score report JSON")
    p.add_argument("--baseline", help="baseline score report JSON for deltas")
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("--out", required=True)
    p.add_argument("--label", default="model")
    p.set_defaults(func=_cmd_report)


def _cmd_report(args: argparse.Namespace) -> None:
    treated = ScoreReport.load(args.scores)
    baseline = ScoreReport.load(args.baseline) if args.baseline else None
    row = report.tabulate_levels(treated, baseline, label=args.label)
    rendered = report.render_levels([row], fmt=args.format)
    _write_out(rendered, args.out)


def _add_target_table(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("target-table", help="per-target FM table from records")
    p.add_argument("--records", required=True)
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("--out", required=True)
    p.add_argument("--label", default="model")
    p.set_defaults(func=_cmd_target_table)


def _cmd_target_table(args: argparse.Namespace) -> None:
    records = orchestrator.load_records(args.records)
    table = report.tabulate_targets(records)
    _write_out(report.render_targets([(args.label, table)], fmt=args.format), args.out)


def _add_mlt_dist(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("mlt-dist", help="self-generated token distribution")
    p.add_argument("--records", required=True)
    p.add_argument("--format", choices=report.FORMATS, default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mlt_dist)


def _cmd_mlt_dist(args: argparse.Namespace) -> None:
    records = orchestrator.load_records(args.records)
    dist = report.mlt_distribution(records)
    _write_out(report.render_distribution(dist, fmt=args.format), args.out)


def _add_serve_mock(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("serve-mock", help="run the deterministic mock backend")
    p.add_argument("--profile", choices=[k.value for k in mockserver.MockKind], required=True)
    p.add_argument("--offset", type=int, help="word-count offset (offset profile)")
    p.add_argument("--fixed-mlt", help='token surface for self-mlt, e.g. "[MLT:150]"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8811)
    p.set_defaults(func=_cmd_serve_mock)


def _cmd_serve_mock(args: argparse.Namespace) -> None:
    profile = mockserver.profile_from_args(
        args.profile, offset=args.offset, fixed_mlt=args.fixed_mlt, seed=args.seed
    )
    server = mockserver.serve(profile, host=args.host, port=args.port)
    print(f"mock backend ({args.profile}) listening on {server.base_url}")
    try:
        while True:
            server.join(1)
    except KeyboardInterrupt:
        server.stop()


def _add_templates(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("templates", help="list built-in chat template names")
    p.set_defaults(func=_cmd_templates)


def _cmd_templates(args: argparse.Namespace) -> None:
    for name, template in sorted(builtin_templates().items()):
        eos = ", ".join(template.eos_tokens)
        print(f"{name}: eos {eos}")


def _write_out(text: str, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tlgkit",
        description="Length-targeted generation benchmark toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_build_tlg(sub)
    _add_build_dmlt(sub)
    _add_run(sub)
    _add_score(sub)
    _add_report(sub)
    _add_target_table(sub)
    _add_mlt_dist(sub)
    _add_serve_mock(sub)
    _add_templates(sub)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except TlgkitError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
