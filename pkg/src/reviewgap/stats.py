"""Per-variety accuracy/MSE, paired significance tests and report rows.

Gap tests are paired t-tests on per-pair differences (cn minus tw) of
correctness indicators (for accuracy) and squared errors (for MSE), with
two-sided p-values from the incomplete-beta kernel. Stars: * p<.05,
** p<.01, *** p<.001.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from reviewgap._kernels import student_t_two_sided_p
from reviewgap.pairing import ReviewPair, round_score, sentiment_class
from reviewgap.predictions import PredictionOutcome, complete_pair_ids
from reviewgap.prng import SplitMix64, derive_seed
from reviewgap.prompts import render_sentiment
from reviewgap.records import ReviewRecord
from reviewgap.scriptclass import SUBSET_ALL, SUBSETS, pair_in_subset
from reviewgap.textstats import (
    DEFAULT_BIN_WIDTH,
    DEFAULT_MAX_LEN,
    DEFAULT_SHORT_MAX,
    LONG,
    OVERALL,
    SHORT,
    length_bin,
    length_group,
    review_length,
)


class UndefinedMetricError(ValueError):
    """Raised when a metric or test is requested on too little data."""


def accuracy(predictions, truths) -> float:
    """Exact-match accuracy in percent."""
    preds = np.asarray(predictions)
    true = np.asarray(truths)
    if preds.size == 0 or preds.shape != true.shape:
        raise UndefinedMetricError("accuracy needs equal-length non-empty inputs")
    return 100.0 * float(np.mean(preds == true))


def mse(predictions, truths) -> float:
    preds = np.asarray(predictions, dtype=float)
    true = np.asarray(truths, dtype=float)
    if preds.size == 0 or preds.shape != true.shape:
        raise UndefinedMetricError("mse needs equal-length non-empty inputs")
    return float(np.mean((preds - true) ** 2))


def paired_t(differences) -> tuple[float, int, float]:
    """One-sample t of per-pair differences against zero: (t, df, p).

    Zero-variance differences degenerate: all-zero gives (0, df, 1);
    constant nonzero gives (+/-inf, df, 0).
    """
    d = np.asarray(differences, dtype=float)
    n = d.size
    if n < 2:
        raise UndefinedMetricError("paired test needs at least 2 differences")
    df = n - 1
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return 0.0, df, 1.0
        return math.copysign(math.inf, mean), df, 0.0
    t = mean / (sd / math.sqrt(n))
    return t, df, student_t_two_sided_p(t, df)


def stars(p: float | None) -> str:
    if p is None:
        return ""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass
class GapReportRow:
    model: str
    variant: str
    length_group: str  # short / long / overall
    subset: str  # all / chinese / chinese+english
    n_pairs: int
    acc_tw: float | None = None
    acc_cn: float | None = None
    delta_acc: float | None = None
    mse_tw: float | None = None
    mse_cn: float | None = None
    delta_mse: float | None = None
    t_acc: float | None = None
    p_acc: float | None = None
    stars_acc: str = ""
    t_mse: float | None = None
    p_mse: float | None = None
    stars_mse: str = ""

    COLUMNS = (
        "model variant length_group subset n_pairs acc_tw acc_cn delta_acc "
        "mse_tw mse_cn delta_mse t_acc p_acc stars_acc t_mse p_mse stars_mse"
    ).split()

    def to_dict(self) -> dict:
        return {c: getattr(self, c) for c in self.COLUMNS}


def pair_length_group(pair: ReviewPair, short_max: int = DEFAULT_SHORT_MAX) -> str:
    # members share a bin but may straddle the short/long boundary inside it;
    # the tw member anchors the pair's group
    return length_group(review_length(pair.tw), short_max)


@dataclass
class _PairCell:
    pair: ReviewPair
    correct_tw: float
    correct_cn: float
    sqerr_tw: float
    sqerr_cn: float


def _cells(outcomes: list[PredictionOutcome], pairs: list[ReviewPair]) -> list[_PairCell]:
    scores: dict[tuple[str, str], int] = {}
    for o in outcomes:
        if o.valid:
            scores[(o.pair_id, o.side)] = o.parsed_score
    complete = complete_pair_ids(outcomes)
    cells = []
    for pair in pairs:
        if pair.pair_id not in complete:
            continue
        truth_tw = round_score(pair.tw.score)
        truth_cn = round_score(pair.cn.score)
        pred_tw = scores[(pair.pair_id, "tw")]
        pred_cn = scores[(pair.pair_id, "cn")]
        cells.append(
            _PairCell(
                pair,
                float(pred_tw == truth_tw),
                float(pred_cn == truth_cn),
                float((pred_tw - truth_tw) ** 2),
                float((pred_cn - truth_cn) ** 2),
            )
        )
    return cells


def _row_for(
    cells: list[_PairCell], model: str, variant: str, group: str, subset: str
) -> GapReportRow:
    row = GapReportRow(model, variant, group, subset, n_pairs=len(cells))
    if not cells:
        return row
    c_tw = np.array([c.correct_tw for c in cells])
    c_cn = np.array([c.correct_cn for c in cells])
    e_tw = np.array([c.sqerr_tw for c in cells])
    e_cn = np.array([c.sqerr_cn for c in cells])
    row.acc_tw = 100.0 * float(np.mean(c_tw))
    row.acc_cn = 100.0 * float(np.mean(c_cn))
    row.delta_acc = row.acc_cn - row.acc_tw
    row.mse_tw = float(np.mean(e_tw))
    row.mse_cn = float(np.mean(e_cn))
    row.delta_mse = row.mse_cn - row.mse_tw
    if len(cells) >= 2:
        row.t_acc, _, row.p_acc = paired_t(c_cn - c_tw)
        row.stars_acc = stars(row.p_acc)
        row.t_mse, _, row.p_mse = paired_t(e_cn - e_tw)
        row.stars_mse = stars(row.p_mse)
    return row


def gap_rows(
    outcomes: list[PredictionOutcome],
    pairs: list[ReviewPair],
    model: str,
    variant: str,
    buckets: dict[str, str] | None = None,
    subsets=SUBSETS,
    short_max: int = DEFAULT_SHORT_MAX,
) -> list[GapReportRow]:
    """One row per (length group, subset) over the complete pairs.

    ``buckets`` (record_id -> script bucket) is required for the character-set
    subsets; with None only the "all" subset is emitted.
    """
    cells = _cells(outcomes, pairs)
    if buckets is None:
        subsets = [SUBSET_ALL]
    rows = []
    for subset in subsets:
        in_subset = [
            c for c in cells if pair_in_subset(c.pair, subset, buckets or {})
        ]
        by_group = {SHORT: [], LONG: []}
        for c in in_subset:
            by_group[pair_length_group(c.pair, short_max)].append(c)
        for group in (SHORT, LONG, OVERALL):
            chosen = in_subset if group == OVERALL else by_group[group]
            rows.append(_row_for(chosen, model, variant, group, subset))
    return rows


def score_mean_gap(pairs: list[ReviewPair]) -> tuple[float, int, float]:
    """Paired test of raw score means between varieties (cn minus tw)."""
    diffs = [pair.cn.score - pair.tw.score for pair in pairs]
    return paired_t(diffs)


# ---------------------------------------------------------------------------
# length sweep pilot: 3-class sentiment accuracy per 10-character bin
# ---------------------------------------------------------------------------

_SENTIMENT_LABELS = ("positive", "negative", "neutral")


@dataclass
class SweepRow:
    bin_index: int
    sentiment: str  # per-class rows plus an "overall" row per bin
    n_available: int
    n_sampled: int
    n_valid: int
    n_correct: int
    accuracy: float | None
    shortfall: bool

    COLUMNS = (
        "bin_index sentiment n_available n_sampled n_valid n_correct accuracy shortfall"
    ).split()

    def to_dict(self) -> dict:
        return {c: getattr(self, c) for c in self.COLUMNS}


def sweep_text(record: ReviewRecord) -> str:
    return "\n".join(record.text_parts())


def length_sweep(
    records: list[ReviewRecord],
    endpoint,
    seed: int = 0,
    bin_width: int = DEFAULT_BIN_WIDTH,
    max_len: int = DEFAULT_MAX_LEN,
    per_bin_quota: int = 200,
) -> tuple[list[SweepRow], int]:
    """Balanced per-(bin, class) sampling and sentiment prediction accuracy.

    Returns (rows, excluded) where excluded counts predictions outside the
    three labels. Classes with no samples in a bin are omitted.
    """
    by_cell: dict[tuple[int, str], list[ReviewRecord]] = {}
    for r in records:
        n = review_length(r)
        if not (1 <= n <= max_len):
            continue
        cell = (length_bin(n, bin_width), sentiment_class(r.score))
        by_cell.setdefault(cell, []).append(r)

    rows: list[SweepRow] = []
    excluded = 0
    n_bins = max_len // bin_width
    for b in range(n_bins):
        bin_valid = bin_correct = bin_sampled = bin_avail = 0
        any_class = False
        for label in _SENTIMENT_LABELS:
            pool = sorted(by_cell.get((b, label), []), key=lambda r: r.record_id)
            if not pool:
                continue
            any_class = True
            rng = SplitMix64(derive_seed(seed, "sweep", b, label))
            chosen = rng.sample(pool, per_bin_quota)
            valid = correct = 0
            for rec in chosen:
                prompt = render_sentiment(sweep_text(rec))
                res = endpoint.complete(prompt, rec)
                answer = (res.raw_text or "").strip().lower()
                if answer not in _SENTIMENT_LABELS:
                    excluded += 1
                    continue
                valid += 1
                if answer == label:
                    correct += 1
            rows.append(
                SweepRow(
                    b, label, len(pool), len(chosen), valid, correct,
                    (100.0 * correct / valid) if valid else None,
                    shortfall=len(pool) < per_bin_quota,
                )
            )
            bin_avail += len(pool)
            bin_sampled += len(chosen)
            bin_valid += valid
            bin_correct += correct
        if any_class:
            rows.append(
                SweepRow(
                    b, "overall", bin_avail, bin_sampled, bin_valid, bin_correct,
                    (100.0 * bin_correct / bin_valid) if bin_valid else None,
                    shortfall=bin_avail < 3 * per_bin_quota,
                )
            )
    return rows, excluded
