"""Concept and rule counts across a threshold sweep on the synthetic corpus.

Writes two CSVs (concept counts per support/intent pair, rule counts per
minsup/minconf pair) and prints them.

    python scripts/threshold_sweep.py [--out sweep] [--corpus corpus.jsonl]
"""

import argparse
from pathlib import Path

from discourse_fca.concepts import concept_count_grid, enumerate_concepts
from discourse_fca.ingest import build_comment_context, build_weekly_context, load_records, split_by_condition
from discourse_fca.reports import csv_text, fmt
from discourse_fca.rules import RuleThresholds, robustness_grid
from discourse_fca.synth import demo_corpus

SUPPORTS = [0.05, 0.10, 0.15, 0.20, 0.30]
INTENTS = [2, 3, 4, 5]
RULE_SUPPORTS = [0.005, 0.01, 0.02, 0.05]
RULE_CONFIDENCES = [0.6, 0.7, 0.8, 0.9]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="sweep")
    ap.add_argument("--corpus", help="JSONL records (default: generated demo corpus)")
    ap.add_argument("--min-lift", type=float, default=1.2)
    args = ap.parse_args()

    if args.corpus:
        with open(args.corpus, "rb") as fh:
            records = load_records(fh).records
    else:
        records = demo_corpus()
    by = split_by_condition(records)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for cond in sorted(by):
        ctx = build_weekly_context(by[cond])
        concepts = enumerate_concepts(ctx)
        for g in concept_count_grid(ctx, SUPPORTS, INTENTS, concepts=concepts):
            rows.append([cond, fmt(g.min_support), g.min_intent_size, g.raw_count, g.filtered_count])
    text = csv_text(["condition", "min_support", "min_intent", "raw", "filtered"], rows)
    (out / "concept_sweep.csv").write_text(text)
    print(text)

    hi, vi = build_comment_context(by["HI"]), build_comment_context(by["VI"])
    grid = [RuleThresholds(s, c, args.min_lift) for s in RULE_SUPPORTS for c in RULE_CONFIDENCES]
    rows = [[fmt(g.thresholds.min_support), fmt(g.thresholds.min_confidence), g.count_a, g.count_b]
            for g in robustness_grid(hi, vi, grid)]
    text = csv_text(["minsup", "minconf", "HI_rules", "VI_rules"], rows)
    (out / "rule_sweep.csv").write_text(text)
    print(text)


if __name__ == "__main__":
    main()
