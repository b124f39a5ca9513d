"""CSV and Markdown emitters for gap rows and the side tables."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from reviewgap.scriptclass import BUCKET_ORDER, SUBSET_ALL, SUBSET_CHINESE, SUBSET_CHINESE_ENGLISH
from reviewgap.stats import GapReportRow, SweepRow
from reviewgap.textstats import LONG, OVERALL, SHORT

_SUBSET_TITLES = {
    SUBSET_ALL: "All",
    SUBSET_CHINESE: "Chinese",
    SUBSET_CHINESE_ENGLISH: "Chinese+English",
}
_GROUP_TITLES = {SHORT: "Short (1-49)", LONG: "Long (50+)", OVERALL: "Overall"}


def _num(value, fmt: str) -> str:
    if value is None:
        return ""
    return format(value, fmt)


def gap_rows_csv(rows: list[GapReportRow]) -> str:
    if not rows:
        raise ValueError("no gap rows to emit")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(GapReportRow.COLUMNS)
    for row in rows:
        d = row.to_dict()
        out = []
        for col in GapReportRow.COLUMNS:
            v = d[col]
            out.append(_num(v, ".10g") if isinstance(v, float) else ("" if v is None else v))
        writer.writerow(out)
    return buf.getvalue()


def read_gap_rows_csv(path: str | Path) -> list[GapReportRow]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for d in csv.DictReader(f):
            kwargs = {}
            for col in GapReportRow.COLUMNS:
                v = d[col]
                if col in ("model", "variant", "length_group", "subset", "stars_acc", "stars_mse"):
                    kwargs[col] = v
                elif col == "n_pairs":
                    kwargs[col] = int(v)
                else:
                    kwargs[col] = float(v) if v != "" else None
            rows.append(GapReportRow(**kwargs))
    return rows


def _variant_order(rows):
    seen = []
    for r in rows:
        if r.variant not in seen:
            seen.append(r.variant)
    return seen


def _model_order(rows):
    seen = []
    for r in rows:
        if r.model not in seen:
            seen.append(r.model)
    return seen


def gap_rows_markdown(rows: list[GapReportRow]) -> str:
    """Acc and MSE tables in the two-variety layout: tw, cn, delta, stars."""
    if not rows:
        raise ValueError("no gap rows to emit")
    variants = _variant_order(rows)
    models = _model_order(rows)
    subsets = [s for s in (_SUBSET_TITLES) if any(r.subset == s for r in rows)]
    by_key = {(r.model, r.variant, r.length_group, r.subset): r for r in rows}

    def table(metric: str, subset: str) -> list[str]:
        tw_f, cn_f, d_f = (
            (".2f", ".2f", ".2f") if metric == "acc" else (".3f", ".3f", ".3f")
        )
        lines = []
        header = ["Length", "Model"]
        for v in variants:
            header += [f"{v} tw", f"{v} cn", f"{v} Δ (cn-tw)", ""]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for group in (SHORT, LONG, OVERALL):
            for model in models:
                cells = [_GROUP_TITLES[group], model]
                for v in variants:
                    r = by_key.get((model, v, group, subset))
                    if r is None or r.n_pairs == 0:
                        cells += ["", "", "", ""]
                        continue
                    tw = getattr(r, f"{metric}_tw")
                    cn = getattr(r, f"{metric}_cn")
                    delta = getattr(r, f"delta_{metric}")
                    star = getattr(r, f"stars_{metric}")
                    cells += [_num(tw, tw_f), _num(cn, cn_f), _num(delta, d_f), star]
                lines.append("| " + " | ".join(cells) + " |")
        return lines

    out = []
    for metric, title in (("acc", "Accuracy (Acc, %) ↑"), ("mse", "Mean Squared Error (MSE) ↓")):
        for subset in subsets:
            out.append(f"## {title} — subset: {_SUBSET_TITLES[subset]}")
            out.append("")
            out.extend(table(metric, subset))
            out.append("")
    return "\n".join(out).rstrip() + "\n"


def validation_markdown(rows) -> str:
    """Valid/invalid prediction counts, one line per (model, variant, group)."""
    if not rows:
        raise ValueError("no validation rows to emit")
    lines = [
        "| Model | Variant | Group | Issued | Valid | Invalid |",
        "|---|---|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {r.model} | {r.variant} | {r.length_group} | {r.issued} | {r.valid} | {r.invalid} |"
        )
    return "\n".join(lines) + "\n"


def validation_csv(rows) -> str:
    if not rows:
        raise ValueError("no validation rows to emit")
    keys = sorted({k for r in rows for k in r.to_dict()})
    head = ["model", "variant", "length_group", "issued", "valid", "invalid"]
    keys = head + [k for k in keys if k not in head]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({**{k: "" for k in keys}, **r.to_dict()})
    return buf.getvalue()


def distribution_markdown(dist: dict[str, dict[str, int]]) -> str:
    """Script-bucket distribution with count and ratio per variety."""
    varieties = [v for v in ("cn", "tw") if v in dist] + sorted(
        v for v in dist if v not in ("cn", "tw")
    )
    totals = {v: sum(dist[v].values()) for v in varieties}
    header = ["Category"]
    for v in varieties:
        header += [f"{v} Count", f"{v} Ratio"]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    seen = set(BUCKET_ORDER)
    extra = sorted({b for v in varieties for b in dist[v]} - seen)
    for bucket in list(BUCKET_ORDER) + extra:
        counts = [dist[v].get(bucket, 0) for v in varieties]
        if not any(counts):
            continue
        cells = [bucket]
        for v, c in zip(varieties, counts):
            ratio = 100.0 * c / totals[v] if totals[v] else 0.0
            cells += [str(c), f"{ratio:.2f}%"]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SweepRow.COLUMNS)
    for r in rows:
        d = r.to_dict()
        writer.writerow(
            [
                _num(d[c], ".6g") if isinstance(d[c], float) else ("" if d[c] is None else d[c])
                for c in SweepRow.COLUMNS
            ]
        )
    return buf.getvalue()


def emit_report(rows: list[GapReportRow], fmt: str, path: str | Path) -> None:
    if fmt == "csv":
        text = gap_rows_csv(rows)
    elif fmt in ("md", "markdown"):
        text = gap_rows_markdown(rows)
    else:
        raise ValueError(f"unknown report format: {fmt!r}")
    Path(path).write_text(text, encoding="utf-8")
