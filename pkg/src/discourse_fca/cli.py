"""Command-line front end: ingest -> contexts -> concepts -> rules -> comparison reports.

Exit codes: 0 success, 1 internal error, 2 input/schema error, 3 resource cap.
Outputs are deterministic: sorted orders, six significant digits for floats,
no timestamps or output paths inside payloads.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .concepts import (
    DEFAULT_MAX_CONCEPTS,
    IcebergParams,
    concept_count_grid,
    enumerate_concepts,
    iceberg_filter,
)
from .diagnostic import (
    cluster_rules,
    compare_intents,
    concept_attribute_histogram,
    marginal_prevalence,
    sentiment_trait_crosssection,
    topic_profiles,
)
from .errors import InfeasibleSpec, ResourceLimitExceeded, SchemaMismatch
from .ingest import (
    CONDITIONS,
    VOCABULARY,
    build_comment_context,
    build_weekly_context,
    dump_jsonl,
    load_records,
    split_by_condition,
    trait_thresholds,
    weekly_aggregate,
    weekly_trait_thresholds,
)
from . import reports
from .rules import (
    DEFAULT_MAX_RULES,
    RuleThresholds,
    attribute_participation,
    mine_rules,
    robustness_grid,
    rule_summary,
)
from .synth import (
    demo_corpus_spec,
    demo_pair_spec,
    generate_context_pair,
    generate_corpus_pair,
    load_spec,
)

log = logging.getLogger("discourse_fca")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
SENSITIVE_TOPICS = ("artificial_identity", "authenticity_critique", "body_image", "mental_health")


class InputError(Exception):
    """Bad input the user can fix; maps to exit code 2."""


@dataclass
class RunConfig:
    input: str | None = None
    input_format: str = "jsonl"
    condition: str | None = None
    scope: str = "per_condition"
    contexts: str | None = None
    records: str | None = None
    out: str = "out"
    format: str = "both"
    min_support: float = 0.20
    min_intent: int = 3
    grid_support: list[float] = field(default_factory=lambda: [0.20, 0.10])
    grid_intent: list[int] = field(default_factory=lambda: [4, 3])
    rule_min_support: float = 0.01
    rule_min_confidence: float = 0.8
    rule_min_lift: float = 1.2
    max_antecedent: int = 3
    consequent_size: int = 1
    rule_grid_support: list[float] = field(default_factory=lambda: [0.005, 0.01, 0.02])
    rule_grid_confidence: list[float] = field(default_factory=lambda: [0.8, 0.9])
    max_concepts: int = DEFAULT_MAX_CONCEPTS
    max_rules: int = DEFAULT_MAX_RULES
    prevalence_on: str = "comments"
    topics: list[str] = field(default_factory=lambda: list(SENSITIVE_TOPICS))
    focus_attribute: str = "topic_appearance"
    spec: str | None = None
    seed: int | None = None
    workers: int = 1

    @property
    def iceberg(self) -> IcebergParams:
        return IcebergParams(self.min_support, self.min_intent)

    @property
    def rule_thresholds(self) -> RuleThresholds:
        return RuleThresholds(
            self.rule_min_support,
            self.rule_min_confidence,
            self.rule_min_lift,
            self.max_antecedent,
            self.consequent_size,
        )

    @property
    def rule_grid(self) -> list[RuleThresholds]:
        return [
            RuleThresholds(s, c, self.rule_min_lift, self.max_antecedent, self.consequent_size)
            for s in self.rule_grid_support
            for c in self.rule_grid_confidence
        ]

    def provenance(self) -> dict:
        """Effective config for embedding in reports (no output paths, no worker count)."""
        d = asdict(self)
        for key in ("out", "workers", "contexts"):
            d.pop(key)
        for key in ("input", "records", "spec"):
            if d[key] is not None:
                d[key] = Path(d[key]).name
        return d

    def want_json(self) -> bool:
        return self.format in ("json", "both")

    def want_csv(self) -> bool:
        return self.format in ("csv", "both")


# -- loading helpers ------------------------------------------------------------


def _load(path: str, fmt: str):
    try:
        with open(path, "rb") as fh:
            result = load_records(fh, fmt)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not UTF-8: {exc}") from None
    if not result.records:
        raise InputError("no valid records")
    return result


def _read_contexts(directory: str, kind: str) -> dict:
    base = Path(directory)
    found = {}
    for cond in CONDITIONS:
        path = base / f"{cond}_{kind}.json"
        if path.exists():
            found[cond] = reports.read_context(path)
    if not found:
        raise InputError(f"no {kind} contexts in {base}")
    return found


def _require_both(ctxs: dict, what: str) -> None:
    missing = [c for c in CONDITIONS if c not in ctxs]
    if missing:
        raise InputError(f"{what} needs both conditions; missing {', '.join(missing)}")


# -- commands ---------------------------------------------------------------------


def cmd_ingest(cfg: RunConfig) -> int:
    result = _load(cfg.input, cfg.input_format)
    records = result.records
    if cfg.condition:
        records = [r for r in records if r.condition == cfg.condition]
        if not records:
            raise InputError(f"no valid records for condition {cfg.condition}")
    by_cond = split_by_condition(records)
    out = Path(cfg.out)
    comment_th = weekly_th = None
    if cfg.scope == "pooled":
        comment_th = trait_thresholds(records, "pooled")
        weeks = [w for c in sorted(by_cond) for w in weekly_aggregate(by_cond[c])]
        weekly_th = weekly_trait_thresholds(weeks)
    summary = {}
    for cond in sorted(by_cond):
        recs = by_cond[cond]
        weekly = build_weekly_context(recs, weekly_th)
        comments = build_comment_context(recs, comment_th)
        reports.write_context(out / "contexts" / f"{cond}_weekly.json", weekly)
        reports.write_context(out / "contexts" / f"{cond}_comments.json", comments)
        summary[cond] = {"records": len(recs), "weeks": weekly.n_objects}
    reports.write_json(
        out / "ingest_report.json",
        {
            "config": cfg.provenance(),
            "conditions": summary,
            "attributes": len(VOCABULARY),
            "rows_read": result.total_rows,
            "rejected": [{"line": r.line, "reason": r.reason} for r in result.rejections],
        },
    )
    log.info("ingested %d records, rejected %d", len(records), len(result.rejections))
    return EXIT_OK


def cmd_concepts(cfg: RunConfig) -> int:
    ctxs = _read_contexts(cfg.contexts, "weekly")
    out = Path(cfg.out)
    payload = {"config": cfg.provenance(), "conditions": {}}
    grids = {}
    for cond in sorted(ctxs):
        ctx = ctxs[cond]
        concepts = enumerate_concepts(ctx, max_concepts=cfg.max_concepts, workers=cfg.workers)
        kept = iceberg_filter(concepts, cfg.iceberg)
        grids[cond] = concept_count_grid(ctx, cfg.grid_support, cfg.grid_intent, concepts=concepts)
        payload["conditions"][cond] = {
            "objects": ctx.n_objects,
            "raw_count": len(concepts),
            "filtered_count": len(kept),
            "filtered": [reports.concept_to_dict(ctx, c) for c in kept],
            "grid": [
                {"min_support": g.min_support, "min_intent_size": g.min_intent_size,
                 "raw_count": g.raw_count, "filtered_count": g.filtered_count}
                for g in grids[cond]
            ],
        }
    if cfg.want_json():
        reports.write_json(out / "concepts.json", payload)
    if cfg.want_csv():
        reports.write_csv(
            out / "concept_grid.csv",
            reports.CONCEPT_GRID_HEADER,
            reports.concept_grid_rows(grids.get("VI"), grids.get("HI")),
        )
    return EXIT_OK


def cmd_rules(cfg: RunConfig) -> int:
    ctxs = _read_contexts(cfg.contexts, "comments")
    out = Path(cfg.out)
    payload = {"config": cfg.provenance(), "conditions": {}}
    listing, summaries = [], []
    for cond in sorted(ctxs):
        ctx = ctxs[cond]
        rules = mine_rules(ctx, cfg.rule_thresholds, max_rules=cfg.max_rules)
        clusters = cluster_rules(rules, attributes=ctx.attribute_names, strict=False)
        summary = rule_summary(rules) if rules else None
        payload["conditions"][cond] = {
            "objects": ctx.n_objects,
            "rule_count": len(rules),
            "rules": [reports.rule_to_dict(ctx, r) for r in rules],
            "summary": None if summary is None else {
                m: {k: reports.jnum(v) for k, v in s.items()} for m, s in summary.items()
            },
            "clusters": [
                {"anchor": None if cl.anchor is None else cl.anchor.name, "size": len(cl.rules)}
                for cl in clusters
            ],
        }
        listing += reports.rule_rows(cond, ctx, clusters)
        summaries += reports.rule_summary_rows(cond, summary)
    grid = None
    if "HI" in ctxs and "VI" in ctxs:
        grid = robustness_grid(ctxs["HI"], ctxs["VI"], cfg.rule_grid, workers=cfg.workers, max_rules=cfg.max_rules)
        payload["grid"] = [
            {"min_support": g.thresholds.min_support, "min_confidence": g.thresholds.min_confidence,
             "min_lift": g.thresholds.min_lift, "HI": g.count_a, "VI": g.count_b}
            for g in grid
        ]
    if cfg.want_json():
        reports.write_json(out / "rules.json", payload)
    if cfg.want_csv():
        reports.write_csv(out / "rules.csv", reports.RULES_HEADER, listing)
        reports.write_csv(out / "rule_summary.csv", reports.RULE_SUMMARY_HEADER, summaries)
        if grid is not None:
            reports.write_csv(out / "rule_grid.csv", reports.RULE_GRID_HEADER, reports.rule_grid_rows(grid))
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    kind = "comments" if cfg.prevalence_on == "comments" else "weekly"
    prevalence_ctxs = _read_contexts(cfg.contexts, kind)
    _require_both(prevalence_ctxs, "compare")
    weekly = _read_contexts(cfg.contexts, "weekly")
    comments = _read_contexts(cfg.contexts, "comments")
    _require_both(weekly, "compare")
    _require_both(comments, "compare")
    out = Path(cfg.out)

    prevalence = marginal_prevalence(prevalence_ctxs["HI"], prevalence_ctxs["VI"])
    kept = {
        c: iceberg_filter(enumerate_concepts(weekly[c], cfg.max_concepts, cfg.workers), cfg.iceberg)
        for c in CONDITIONS
    }
    cmp = compare_intents(kept["HI"], kept["VI"])
    names = weekly["HI"].attribute_names
    histograms = {
        "shared": concept_attribute_histogram(cmp.shared, names),
        "HI-only": concept_attribute_histogram(cmp.only_a, names),
        "VI-only": concept_attribute_histogram(cmp.only_b, names),
    }
    participation = {}
    for c in CONDITIONS:
        ctx = comments[c]
        rules = mine_rules(ctx, cfg.rule_thresholds, max_rules=cfg.max_rules)
        try:
            participation[c] = attribute_participation(rules, ctx.attribute(cfg.focus_attribute))
        except KeyError:
            raise InputError(f"unknown attribute {cfg.focus_attribute!r}") from None

    payload = {
        "config": cfg.provenance(),
        "intents": {
            "shared": [list(weekly["HI"].attr_names(i)) for i in cmp.shared],
            "HI_only": [list(weekly["HI"].attr_names(i)) for i in cmp.only_a],
            "VI_only": [list(weekly["HI"].attr_names(i)) for i in cmp.only_b],
        },
        "prevalence": [
            {"attribute": r.attribute.name, "HI": reports.jnum(r.prevalence_a),
             "VI": reports.jnum(r.prevalence_b), "delta": reports.jnum(r.delta)}
            for r in prevalence
        ],
        "focus_attribute": cfg.focus_attribute,
        "focus_participation": participation,
    }

    profile_rows, cross_rows = [], []
    if cfg.records:
        records = _load(cfg.records, cfg.input_format).records
        by_cond = split_by_condition(records)
        payload["topic_profiles"] = {}
        for c in sorted(by_cond):
            profiles, absent = topic_profiles(by_cond[c], cfg.topics)
            profile_rows += reports.topic_profile_rows(c, profiles)
            payload["topic_profiles"][c] = {
                "present": [p.topic for p in profiles],
                "absent": absent,
            }
        cross_rows = reports.crosssection_rows(sentiment_trait_crosssection(records))

    if cfg.want_json():
        reports.write_json(out / "compare.json", payload)
    if cfg.want_csv():
        reports.write_csv(out / "prevalence.csv", reports.PREVALENCE_HEADER, reports.prevalence_rows(prevalence))
        reports.write_csv(
            out / "concept_histograms.csv",
            reports.HISTOGRAM_HEADER,
            [[cat, name, n] for cat, hist in histograms.items() for name, n in hist],
        )
        if cfg.records:
            reports.write_csv(out / "topic_profiles.csv", reports.TOPIC_PROFILE_HEADER, profile_rows)
            reports.write_csv(out / "crosssection.csv", reports.CROSSSECTION_HEADER, cross_rows)
    return EXIT_OK


def cmd_synth(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    corpus_spec = load_spec(cfg.spec) if cfg.spec else demo_corpus_spec()
    pair_spec = load_spec(cfg.spec) if cfg.spec else demo_pair_spec()
    if cfg.seed is not None:
        corpus_spec = replace(corpus_spec, seed=cfg.seed)
        pair_spec = replace(pair_spec, seed=cfg.seed)
    records = generate_corpus_pair(corpus_spec)
    out.mkdir(parents=True, exist_ok=True)
    (out / "corpus.jsonl").write_text(dump_jsonl(records), encoding="utf-8")
    ctx_a, ctx_b = generate_context_pair(pair_spec)
    reports.write_context(out / "context_A.json", ctx_a)
    reports.write_context(out / "context_B.json", ctx_b)
    th = cfg.rule_thresholds
    report = {
        "config": cfg.provenance(),
        "corpus_spec": corpus_spec.to_dict(),
        "pair_spec": pair_spec.to_dict(),
        "corpus_records": len(records),
        "column_sums_A": [ctx_a.column_count(j) for j in range(ctx_a.n_attributes)],
        "column_sums_B": [ctx_b.column_count(j) for j in range(ctx_b.n_attributes)],
    }
    if cfg.focus_attribute in ctx_a.attribute_names:
        attr = ctx_a.attribute(cfg.focus_attribute)
        report["focus_participation"] = {
            "A": attribute_participation(mine_rules(ctx_a, th), attr),
            "B": attribute_participation(mine_rules(ctx_b, th), attr),
        }
    reports.write_json(out / "synth_report.json", report)
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    """Run ingest, concepts, rules and compare into subdirectories of ``out``."""
    out = Path(cfg.out)
    cmd_ingest(replace(cfg, out=str(out / "ingest")))
    contexts = str(out / "ingest" / "contexts")
    cmd_concepts(replace(cfg, contexts=contexts, out=str(out / "concepts")))
    cmd_rules(replace(cfg, contexts=contexts, out=str(out / "rules")))
    ctxs = _read_contexts(contexts, "comments")
    if all(c in ctxs for c in CONDITIONS):
        cmd_compare(replace(cfg, contexts=contexts, records=cfg.input, out=str(out / "compare")))
    else:
        log.warning("only %s present; skipping compare", ", ".join(sorted(ctxs)))
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "concepts": cmd_concepts,
    "rules": cmd_rules,
    "compare": cmd_compare,
    "synth": cmd_synth,
    "report": cmd_report,
}


# -- argument parsing -------------------------------------------------------------


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _add_iceberg(p):
    g = p.add_argument_group("iceberg filtering")
    g.add_argument("--min-support", type=float, default=0.20)
    g.add_argument("--min-intent", type=int, default=3, help="keep concepts with |intent| >= this")
    g.add_argument("--grid-support", type=_floats, default=[0.20, 0.10])
    g.add_argument("--grid-intent", type=_ints, default=[4, 3])
    g.add_argument("--max-concepts", type=int, default=DEFAULT_MAX_CONCEPTS)


def _add_rules(p):
    g = p.add_argument_group("rule mining")
    g.add_argument("--rule-min-support", type=float, default=0.01)
    g.add_argument("--rule-min-confidence", type=float, default=0.8)
    g.add_argument("--rule-min-lift", type=float, default=1.2, help="strict: lift > this")
    g.add_argument("--max-antecedent", type=int, default=3)
    g.add_argument("--consequent-size", type=int, default=1)
    g.add_argument("--rule-grid-support", type=_floats, default=[0.005, 0.01, 0.02])
    g.add_argument("--rule-grid-confidence", type=_floats, default=[0.8, 0.9])
    g.add_argument("--max-rules", type=int, default=DEFAULT_MAX_RULES)


def _add_common(p, out_default="out"):
    p.add_argument("--out", default=out_default, help="output directory")
    p.add_argument("--format", choices=["json", "csv", "both"], default="both")
    p.add_argument("--workers", type=int, default=1, help="process-level parallelism")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_input(p, positional=True):
    if positional:
        p.add_argument("input", help="enriched comment records")
    p.add_argument("--input-format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--condition", choices=list(CONDITIONS))
    p.add_argument("--scope", choices=["per_condition", "pooled"], default="per_condition",
                   help="trait binarization thresholds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="discourse-fca", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="records -> serialized weekly and comment contexts")
    _add_input(p)
    _add_common(p)

    p = sub.add_parser("concepts", help="concept enumeration, iceberg filter, count grid")
    p.add_argument("--contexts", required=True, help="directory written by ingest")
    _add_iceberg(p)
    _add_common(p)

    p = sub.add_parser("rules", help="association rules, summaries, robustness grid")
    p.add_argument("--contexts", required=True)
    _add_rules(p)
    _add_common(p)

    p = sub.add_parser("compare", help="cross-condition structural comparison")
    p.add_argument("--contexts", required=True)
    p.add_argument("--records", help="records file for topic profiles and cross-section")
    p.add_argument("--input-format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--prevalence-on", choices=["comments", "weekly"], default="comments")
    p.add_argument("--topics", type=lambda s: [t.strip() for t in s.split(",") if t.strip()],
                   default=list(SENSITIVE_TOPICS))
    p.add_argument("--focus-attribute", default="topic_appearance")
    _add_iceberg(p)
    _add_rules(p)
    _add_common(p)

    p = sub.add_parser("synth", help="generate the demo corpus and matched-marginal context pair")
    p.add_argument("--spec", help="synthetic spec JSON (default: bundled demo)")
    p.add_argument("--seed", type=int)
    p.add_argument("--focus-attribute", default="topic_appearance")
    _add_rules(p)
    _add_common(p)

    p = sub.add_parser("report", help="ingest, concepts, rules and compare in one run")
    _add_input(p)
    p.add_argument("--prevalence-on", choices=["comments", "weekly"], default="comments")
    p.add_argument("--topics", type=lambda s: [t.strip() for t in s.split(",") if t.strip()],
                   default=list(SENSITIVE_TOPICS))
    p.add_argument("--focus-attribute", default="topic_appearance")
    _add_iceberg(p)
    _add_rules(p)
    _add_common(p)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in known})


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if ns.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    cfg = config_from_args(ns)
    try:
        return COMMANDS[ns.command](cfg)
    except ResourceLimitExceeded as exc:
        print(f"error: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, SchemaMismatch, InfeasibleSpec, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
