"""Command-line interface; one subcommand per pipeline stage plus `run`."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from reviewgap import __version__
from reviewgap.llm import parse_endpoint_spec, read_results, run_eval, write_results
from reviewgap.pairing import build_pairs, eligible
from reviewgap.pipeline import (
    RunConfig,
    StageError,
    load_buckets,
    read_pairs,
    run_pipeline,
    write_pairs,
)
from reviewgap.predictions import outcomes_from_results, read_outcomes, validation_summary, write_outcomes
from reviewgap.prompts import VARIANTS, render, shuffle_seed
from reviewgap.records import (
    dump_json_line,
    filter_nonempty,
    filter_varieties,
    load_field_map,
    parse_records,
    read_records,
    write_records,
)
from reviewgap.reporting import (
    distribution_markdown,
    emit_report,
    gap_rows_csv,
    read_gap_rows_csv,
    sweep_csv,
    validation_csv,
    validation_markdown,
)
from reviewgap.scriptclass import SUBSETS, bucket_distribution, profile_records
from reviewgap.stats import gap_rows, length_sweep
from reviewgap.textstats import length_histogram
from reviewgap.translate import DIRECTIONS, mt_pairs, parse_translator_spec


def _add_common_pairing_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bin-width", type=int, default=10)
    p.add_argument("--max-len", type=int, default=500)
    p.add_argument("--neg-max", type=int, default=3, help="highest negative-class score")
    p.add_argument("--neu-max", type=int, default=7, help="highest neutral-class score")


def cmd_ingest(args) -> int:
    fmap = load_field_map(args.field_map) if args.field_map else None
    with open(args.input, "r", encoding="utf-8") as f:
        records, report = parse_records(f, fmap, args.tw_code, args.cn_code)
    nonempty = filter_nonempty(records)
    write_records(args.output, nonempty)
    if args.reject_log:
        with open(args.reject_log, "w", encoding="utf-8") as f:
            for entry in report.rejected:
                f.write(dump_json_line(entry) + "\n")
    print(
        f"lines={report.total} parsed={report.parsed} skipped={report.skipped} "
        f"rejected={len(report.rejected)} empty_dropped={report.parsed - len(nonempty)} "
        f"written={len(nonempty)}"
    )
    return 0


def cmd_stats(args) -> int:
    records = read_records(args.records)
    hist = length_histogram(records, args.bin_width)
    for variety in sorted(hist):
        print(f"{variety}:")
        for b, count in sorted(hist[variety].items()):
            lo, hi = b * args.bin_width + 1, (b + 1) * args.bin_width
            print(f"  {lo:>4}-{hi:<4} {count}")
    return 0


def cmd_classify(args) -> int:
    records = read_records(args.records)
    profiles = profile_records(records)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            for r in records:
                f.write(
                    dump_json_line({"record_id": r.record_id, "bucket": profiles[r.record_id].bucket})
                    + "\n"
                )
    print(distribution_markdown(bucket_distribution(records, profiles)), end="")
    return 0


def cmd_pair(args) -> int:
    records = read_records(args.records)
    tw, cn, excluded = filter_varieties(records)
    tw, dropped_tw = eligible(tw, args.max_len)
    cn, dropped_cn = eligible(cn, args.max_len)
    pairs = build_pairs(tw, cn, args.seed, args.bin_width, args.neg_max, args.neu_max)
    write_pairs(args.output, pairs)
    print(
        f"pairs={len(pairs)} tw={len(tw)} cn={len(cn)} "
        f"excluded_variety={excluded} excluded_length={dropped_tw + dropped_cn}"
    )
    return 0


def cmd_render(args) -> int:
    pairs = read_pairs(args.pairs)
    shown = 0
    for pair in pairs:
        for side, record in (("tw", pair.tw), ("cn", pair.cn)):
            prompt = render(record, args.variant, shuffle_seed(args.seed, pair.pair_id, side))
            print(f"--- pair {pair.pair_id} side {side} ({args.variant}) ---")
            if prompt.system_text:
                print(f"[system] {prompt.system_text}")
            print(prompt.user_text)
            shown += 1
            if args.limit and shown >= args.limit:
                return 0
    return 0


def cmd_eval(args) -> int:
    pairs = read_pairs(args.pairs)
    endpoint = parse_endpoint_spec(args.model)
    results, manifest = run_eval(pairs, endpoint, args.variant, args.seed, args.parallelism)
    write_results(args.output, results)
    if args.manifest:
        Path(args.manifest).write_text(
            json.dumps({**manifest.to_dict(), "hash": manifest.hash}, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    failures = sum(1 for r in results if r.transport_error)
    print(f"requests={len(results)} transport_errors={failures} run_hash={manifest.hash}")
    return 0


def cmd_validate(args) -> int:
    results = read_results(args.results)
    pairs = read_pairs(args.pairs)
    model = args.model or _model_from_results(args.results)
    outcomes = outcomes_from_results(results, model)
    write_outcomes(args.output, outcomes)
    rows = validation_summary(outcomes, pairs, args.short_max)
    if args.summary:
        Path(args.summary).write_text(validation_csv(rows), encoding="utf-8")
    print(validation_markdown(rows), end="")
    return 0


def _model_from_results(path: str) -> str:
    # eval artifacts are named "<model>__<variant>.jsonl"
    stem = Path(path).stem
    return stem.split("__", 1)[0] if "__" in stem else stem


def cmd_metrics(args) -> int:
    pairs = read_pairs(args.pairs)
    buckets = load_buckets(args.profiles) if args.profiles else None
    rows = []
    for path in args.outcomes:
        outcomes = read_outcomes(path)
        if not outcomes:
            continue
        model = outcomes[0].model
        variant = outcomes[0].variant
        subsets = tuple(args.subsets.split(",")) if args.subsets else SUBSETS
        rows.extend(gap_rows(outcomes, pairs, model, variant, buckets, subsets, args.short_max))
    Path(args.output).write_text(gap_rows_csv(rows), encoding="utf-8")
    print(f"rows={len(rows)} -> {args.output}")
    return 0


def cmd_mt(args) -> int:
    pairs = read_pairs(args.pairs)
    translator = parse_translator_spec(args.translator, args.cache)
    units, dropped = mt_pairs(pairs, args.direction, translator)
    endpoint = parse_endpoint_spec(args.model)
    results, manifest = run_eval(units, endpoint, args.variant, args.seed, args.parallelism)
    write_results(args.output, results)
    if args.pairs_out:
        write_pairs(args.pairs_out, units)
    print(
        f"direction={args.direction} units={len(units)} dropped={len(dropped)} "
        f"requests={len(results)} run_hash={manifest.hash}"
    )
    return 0


def cmd_sweep(args) -> int:
    records = read_records(args.records)
    endpoint = parse_endpoint_spec(args.model)
    rows, excluded = length_sweep(
        records, endpoint, args.seed, args.bin_width, args.max_len, args.quota
    )
    Path(args.output).write_text(sweep_csv(rows), encoding="utf-8")
    print(f"rows={len(rows)} excluded_predictions={excluded} -> {args.output}")
    return 0


def cmd_report(args) -> int:
    rows = read_gap_rows_csv(args.gap_rows)
    emit_report(rows, args.format, args.output)
    print(f"report ({args.format}) -> {args.output}")
    return 0


def cmd_run(args) -> int:
    if args.config:
        config = RunConfig.from_file(args.config)
    else:
        config = RunConfig()
    overrides = {}
    for key in ("input", "outdir", "seed", "parallelism"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.models:
        overrides["models"] = tuple(args.models.split(","))
    if args.variants:
        overrides["variants"] = tuple(args.variants.split(","))
    config = replace(config, **overrides)
    if not config.input:
        print("run: no input file configured", file=sys.stderr)
        return 2
    try:
        bundle = run_pipeline(config)
    except StageError as exc:
        print(f"pipeline failed at stage '{exc.stage}': {exc.cause}", file=sys.stderr)
        return 1
    print(f"bundle manifest: {bundle}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewgap",
        description="Contextually aligned review pairing and LLM rating-gap benchmark.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw records, apply inclusion filters")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--field-map", help="JSON file remapping source key names")
    p.add_argument("--reject-log", help="write one line per rejected record")
    p.add_argument("--tw-code", default="tw")
    p.add_argument("--cn-code", default="cn")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("stats", help="length histogram per variety")
    p.add_argument("records")
    p.add_argument("--bin-width", type=int, default=10)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("classify", help="script buckets and distribution table")
    p.add_argument("records")
    p.add_argument("-o", "--output", help="write per-record buckets (jsonl)")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("pair", help="build aligned tw/cn review pairs")
    p.add_argument("records")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_common_pairing_flags(p)
    p.set_defaults(fn=cmd_pair)

    p = sub.add_parser("render", help="print prompts for inspection")
    p.add_argument("pairs")
    p.add_argument("--variant", choices=VARIANTS, default="structured")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=4)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("eval", help="run one (model, variant) evaluation")
    p.add_argument("pairs")
    p.add_argument("--model", required=True, help="mock:* or name=url[,env=VAR][,nosystem]")
    p.add_argument("--variant", choices=VARIANTS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--manifest", help="write the run manifest (json)")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("validate", help="parse completions into validated scores")
    p.add_argument("results")
    p.add_argument("--pairs", required=True)
    p.add_argument("--model", help="model name (default: from results filename)")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--summary", help="write valid/invalid counts (csv)")
    p.add_argument("--short-max", type=int, default=49)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("metrics", help="accuracy/MSE gap rows with significance")
    p.add_argument("outcomes", nargs="+")
    p.add_argument("--pairs", required=True)
    p.add_argument("--profiles", help="per-record buckets (enables subsets)")
    p.add_argument("--subsets", help="comma list: all,chinese,chinese+english")
    p.add_argument("--short-max", type=int, default=49)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("mt", help="translation round-trip evaluation")
    p.add_argument("pairs")
    p.add_argument("--direction", choices=DIRECTIONS, required=True)
    p.add_argument("--translator", required=True, help="URL, mock:identity or mock:charmap")
    p.add_argument("--cache", help="translation cache file (jsonl)")
    p.add_argument("--model", required=True)
    p.add_argument("--variant", choices=VARIANTS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--pairs-out", help="write the (original, translated) units")
    p.set_defaults(fn=cmd_mt)

    p = sub.add_parser("sweep", help="sentiment accuracy by length bin")
    p.add_argument("records")
    p.add_argument("--model", required=True)
    p.add_argument("--quota", type=int, default=200, help="samples per (bin, class)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bin-width", type=int, default=10)
    p.add_argument("--max-len", type=int, default=500)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("report", help="emit gap rows as csv or markdown")
    p.add_argument("gap_rows")
    p.add_argument("--format", choices=("csv", "md", "markdown"), default="md")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("run", help="end-to-end pipeline")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--input")
    p.add_argument("--outdir")
    p.add_argument("--seed", type=int)
    p.add_argument("--parallelism", type=int)
    p.add_argument("--models", help="comma list of endpoint specs")
    p.add_argument("--variants", help="comma list of variants")
    p.set_defaults(fn=cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
