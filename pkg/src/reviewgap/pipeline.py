"""End-to-end pipeline: staged artifacts, sidecar manifests, resumability.

Every stage writes line-delimited artifacts plus a manifest recording the
config slice, input/output hashes and asset versions. A stage is skipped on
rerun when its manifest still matches, so a run can resume after a failure.
Nothing in an artifact depends on wall-clock time: identical config and
deterministic endpoints give a byte-identical bundle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from reviewgap import charsets, prompts
from reviewgap.llm import parse_endpoint_spec, read_results, run_eval, write_results
from reviewgap.manifests import file_sha256, manifest_hash, read_manifest, write_manifest
from reviewgap.pairing import ReviewPair, build_pairs, eligible
from reviewgap.predictions import (
    outcomes_from_results,
    read_outcomes,
    validation_summary,
    write_outcomes,
)
from reviewgap.prompts import VARIANTS
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
    gap_rows_csv,
    gap_rows_markdown,
    validation_csv,
    validation_markdown,
)
from reviewgap.scriptclass import SUBSETS, bucket_distribution, profile_records
from reviewgap.stats import gap_rows, score_mean_gap
from reviewgap.textstats import length_histogram


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    """Pipeline parameters; defaults are the published experiment values."""

    input: str = ""
    outdir: str = "out"
    seed: int = 0
    bin_width: int = 10
    max_len: int = 500
    short_max: int = 49
    neg_max: int = 3
    neu_max: int = 7
    tw_code: str = "tw"
    cn_code: str = "cn"
    models: tuple = ("mock:echo-score",)
    variants: tuple = VARIANTS
    subsets: tuple = SUBSETS
    parallelism: int = 1
    field_map: str = ""

    _LIST_KEYS = ("models", "variants", "subsets")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        """Flat key=value config file; '#' starts a comment, lists are comma-separated."""
        cfg = cls()
        valid = {f.name for f in fields(cls) if not f.name.startswith("_")}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in valid:
                raise ValueError(f"unknown config key: {key!r}")
            cfg = replace(cfg, **{key: cls._coerce(key, value)})
        return cfg

    @classmethod
    def _coerce(cls, key: str, value: str):
        if key in cls._LIST_KEYS:
            return tuple(v.strip() for v in value.split(",") if v.strip())
        current = getattr(cls(), key)
        if isinstance(current, bool):
            return value.lower() in ("1", "true", "yes")
        if isinstance(current, int):
            return int(value)
        return value

    def to_dict(self) -> dict:
        return {
            f.name: list(v) if isinstance(v := getattr(self, f.name), tuple) else v
            for f in fields(self)
            if not f.name.startswith("_")
        }


def _versions() -> dict:
    return {
        "templates": prompts.template_version(),
        "charsets": charsets.default_tables().version,
    }


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "-" for c in name)


@dataclass
class _Stage:
    """Bookkeeping for one pipeline stage."""

    outdir: Path
    name: str
    config: dict
    inputs: dict = field(default_factory=dict)

    @property
    def manifest_path(self) -> Path:
        return self.outdir / f"{self.name}.manifest.json"

    def _identity(self) -> dict:
        return {
            "stage": self.name,
            "config": self.config,
            "inputs": {k: file_sha256(v) for k, v in sorted(self.inputs.items())},
            "versions": _versions(),
        }

    def fresh(self, outputs: list[Path]) -> bool:
        if not self.manifest_path.exists() or not all(p.exists() for p in outputs):
            return False
        try:
            old = read_manifest(self.manifest_path)
        except (OSError, json.JSONDecodeError):
            return False
        ident = self._identity()
        if old.get("identity_hash") != manifest_hash(ident):
            return False
        return all(
            file_sha256(self.outdir / name) == digest
            for name, digest in old.get("outputs", {}).items()
        )

    def finish(self, outputs: list[Path], info: dict | None = None) -> None:
        ident = self._identity()
        data = dict(ident)
        data["identity_hash"] = manifest_hash(ident)
        data["outputs"] = {
            str(p.relative_to(self.outdir)): file_sha256(p) for p in sorted(outputs)
        }
        if info:
            data["info"] = info
        write_manifest(self.manifest_path, data)


def run_pipeline(config: RunConfig, log=print) -> Path:
    """Execute all stages; returns the bundle manifest path."""
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stages = [
        ("ingest", _stage_ingest),
        ("stats", _stage_stats),
        ("classify", _stage_classify),
        ("pair", _stage_pair),
        ("eval", _stage_eval),
        ("validate", _stage_validate),
        ("metrics", _stage_metrics),
        ("report", _stage_report),
    ]
    for name, fn in stages:
        try:
            skipped = fn(config, outdir)
        except Exception as exc:
            raise StageError(name, exc) from exc
        log(f"[{name}] {'up to date' if skipped else 'done'}")
    return _write_bundle(outdir)


def _write_bundle(outdir: Path) -> Path:
    files = sorted(
        p for p in outdir.rglob("*") if p.is_file() and p.name != "bundle.manifest.json"
    )
    entries = {str(p.relative_to(outdir)): file_sha256(p) for p in files}
    bundle = {
        "files": entries,
        "bundle_hash": manifest_hash(entries),
        "manifests": sorted(k for k in entries if k.endswith(".manifest.json")),
    }
    path = outdir / "bundle.manifest.json"
    write_manifest(path, bundle)
    return path


# --- stages ----------------------------------------------------------------


def _stage_ingest(config: RunConfig, outdir: Path) -> bool:
    out = outdir / "records.jsonl"
    reject_log = outdir / "rejects.jsonl"
    stage = _Stage(
        outdir, "ingest",
        {k: getattr(config, k) for k in ("tw_code", "cn_code", "field_map")},
        {"input": Path(config.input)},
    )
    if stage.fresh([out, reject_log]):
        return True
    fmap = load_field_map(config.field_map) if config.field_map else None
    with open(config.input, "r", encoding="utf-8") as f:
        records, report = parse_records(f, fmap, config.tw_code, config.cn_code)
    nonempty = filter_nonempty(records)
    write_records(out, nonempty)
    with open(reject_log, "w", encoding="utf-8") as f:
        for entry in report.rejected:
            f.write(dump_json_line(entry) + "\n")
    stage.finish(
        [out, reject_log],
        {
            "lines": report.total,
            "parsed": report.parsed,
            "skipped": report.skipped,
            "rejected": len(report.rejected),
            "empty_dropped": report.parsed - len(nonempty),
        },
    )
    return False


def _stage_stats(config: RunConfig, outdir: Path) -> bool:
    records_path = outdir / "records.jsonl"
    out = outdir / "length_histogram.json"
    stage = _Stage(outdir, "stats", {"bin_width": config.bin_width}, {"records": records_path})
    if stage.fresh([out]):
        return True
    hist = length_histogram(read_records(records_path), config.bin_width)
    data = {v: {str(b): c for b, c in sorted(hist[v].items())} for v in sorted(hist)}
    out.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    stage.finish([out])
    return False


def _stage_classify(config: RunConfig, outdir: Path) -> bool:
    records_path = outdir / "records.jsonl"
    profiles_path = outdir / "profiles.jsonl"
    dist_path = outdir / "script_distribution.md"
    stage = _Stage(outdir, "classify", {}, {"records": records_path})
    if stage.fresh([profiles_path, dist_path]):
        return True
    records = read_records(records_path)
    profiles = profile_records(records)
    with open(profiles_path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(dump_json_line({"record_id": r.record_id, "bucket": profiles[r.record_id].bucket}) + "\n")
    dist_path.write_text(distribution_markdown(bucket_distribution(records, profiles)), encoding="utf-8")
    stage.finish([profiles_path, dist_path])
    return False


def _stage_pair(config: RunConfig, outdir: Path) -> bool:
    records_path = outdir / "records.jsonl"
    pairs_path = outdir / "pairs.jsonl"
    keys = ("seed", "bin_width", "max_len", "neg_max", "neu_max")
    stage = _Stage(outdir, "pair", {k: getattr(config, k) for k in keys}, {"records": records_path})
    if stage.fresh([pairs_path]):
        return True
    records = read_records(records_path)
    tw, cn, excluded_variety = filter_varieties(records)
    tw, dropped_tw = eligible(tw, config.max_len)
    cn, dropped_cn = eligible(cn, config.max_len)
    pairs = build_pairs(tw, cn, config.seed, config.bin_width, config.neg_max, config.neu_max)
    write_pairs(pairs_path, pairs)
    stage.finish(
        [pairs_path],
        {
            "pairs": len(pairs),
            "tw_candidates": len(tw),
            "cn_candidates": len(cn),
            "excluded_variety": excluded_variety,
            "excluded_length": dropped_tw + dropped_cn,
        },
    )
    return False


def _run_name(model: str, variant: str) -> str:
    return f"{_slug(model)}__{variant}"


def _stage_eval(config: RunConfig, outdir: Path) -> bool:
    pairs_path = outdir / "pairs.jsonl"
    evaldir = outdir / "eval"
    evaldir.mkdir(exist_ok=True)
    all_fresh = True
    pairs = None
    for model_spec in config.models:
        endpoint = parse_endpoint_spec(model_spec)
        for variant in config.variants:
            name = _run_name(endpoint.name, variant)
            out = evaldir / f"{name}.jsonl"
            stage = _Stage(
                outdir, f"eval.{name}",
                {"model": model_spec, "variant": variant, "seed": config.seed},
                {"pairs": pairs_path},
            )
            if stage.fresh([out]):
                continue
            all_fresh = False
            if pairs is None:
                pairs = read_pairs(pairs_path)
            results, manifest = run_eval(pairs, endpoint, variant, config.seed, config.parallelism)
            write_results(out, results)
            stage.finish([out], {"run_manifest": manifest.to_dict(), "run_hash": manifest.hash})
    return all_fresh


def _stage_validate(config: RunConfig, outdir: Path) -> bool:
    pairs_path = outdir / "pairs.jsonl"
    outcomedir = outdir / "outcomes"
    outcomedir.mkdir(exist_ok=True)
    summary_csv = outdir / "validation_summary.csv"
    summary_md = outdir / "validation_summary.md"

    runs = []
    for model_spec in config.models:
        endpoint = parse_endpoint_spec(model_spec)
        for variant in config.variants:
            runs.append((endpoint.name, variant))

    eval_inputs = {
        f"eval/{_run_name(m, v)}": outdir / "eval" / f"{_run_name(m, v)}.jsonl" for m, v in runs
    }
    stage = _Stage(
        outdir, "validate", {"short_max": config.short_max},
        {"pairs": pairs_path, **eval_inputs},
    )
    outputs = [outcomedir / f"{_run_name(m, v)}.jsonl" for m, v in runs]
    outputs += [summary_csv, summary_md]
    if stage.fresh(outputs):
        return True

    pairs = read_pairs(pairs_path)
    all_rows = []
    for model, variant in runs:
        results = read_results(outdir / "eval" / f"{_run_name(model, variant)}.jsonl")
        outcomes = outcomes_from_results(results, model)
        write_outcomes(outcomedir / f"{_run_name(model, variant)}.jsonl", outcomes)
        all_rows.extend(validation_summary(outcomes, pairs, config.short_max))
    summary_csv.write_text(validation_csv(all_rows), encoding="utf-8")
    summary_md.write_text(validation_markdown(all_rows), encoding="utf-8")
    stage.finish(outputs)
    return False


def _stage_metrics(config: RunConfig, outdir: Path) -> bool:
    pairs_path = outdir / "pairs.jsonl"
    profiles_path = outdir / "profiles.jsonl"
    out = outdir / "gap_rows.csv"

    runs = []
    for model_spec in config.models:
        endpoint = parse_endpoint_spec(model_spec)
        for variant in config.variants:
            runs.append((endpoint.name, variant))
    outcome_inputs = {
        f"outcomes/{_run_name(m, v)}": outdir / "outcomes" / f"{_run_name(m, v)}.jsonl"
        for m, v in runs
    }
    stage = _Stage(
        outdir, "metrics",
        {"short_max": config.short_max, "subsets": list(config.subsets)},
        {"pairs": pairs_path, "profiles": profiles_path, **outcome_inputs},
    )
    if stage.fresh([out]):
        return True

    pairs = read_pairs(pairs_path)
    buckets = load_buckets(profiles_path)
    rows = []
    for model, variant in runs:
        outcomes = read_outcomes(outdir / "outcomes" / f"{_run_name(model, variant)}.jsonl")
        rows.extend(
            gap_rows(outcomes, pairs, model, variant, buckets, config.subsets, config.short_max)
        )
    out.write_text(gap_rows_csv(rows), encoding="utf-8")
    stage.finish([out], {"rows": len(rows)})
    return False


def _stage_report(config: RunConfig, outdir: Path) -> bool:
    gap_path = outdir / "gap_rows.csv"
    pairs_path = outdir / "pairs.jsonl"
    out = outdir / "report.md"
    stage = _Stage(outdir, "report", {}, {"gap_rows": gap_path, "pairs": pairs_path})
    if stage.fresh([out]):
        return True
    from reviewgap.reporting import read_gap_rows_csv

    rows = read_gap_rows_csv(gap_path)
    pairs = read_pairs(pairs_path)
    parts = ["# Variety gap report", ""]
    if len(pairs) >= 2:
        t, df, p = score_mean_gap(pairs)
        parts.append(
            f"Raw score difference between varieties (cn-tw): t({df}) = {t:.3f}, p = {p:.3f}."
        )
        parts.append("")
    parts.append(gap_rows_markdown(rows))
    upstream = sorted(
        str(p.name) for p in outdir.glob("*.manifest.json") if p.name != "report.manifest.json"
    )
    parts.append("")
    parts.append("Upstream manifests: " + ", ".join(upstream))
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")
    stage.finish([out])
    return False


# --- pair file I/O ----------------------------------------------------------


def write_pairs(path: str | Path, pairs: list[ReviewPair]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for p in pairs:
            f.write(dump_json_line(p.to_dict()) + "\n")


def read_pairs(path: str | Path) -> list[ReviewPair]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(ReviewPair.from_dict(json.loads(line)))
    return out


def load_buckets(profiles_path: str | Path) -> dict[str, str]:
    buckets = {}
    with open(profiles_path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                d = json.loads(line)
                buckets[d["record_id"]] = d["bucket"]
    return buckets
