"""Serialized contexts and the CSV/JSON report tables.

Context container (JSON)::

    {
      "format": "discourse-fca-context",
      "version": 1,
      "attributes": ["sentiment_Positive", ...],
      "objects": ["2024-W01", ...],
      "rows": ["00a0021", ...]
    }

Each row is the object's attribute bit vector as zero-padded lowercase hex,
bit ``i`` standing for ``attributes[i]``.

CSV tables: prevalence, concept grid, rule listing, rule summary, rule
grid, sentiment/trait cross-section, topic profiles and histograms.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .concepts import FormalConcept, GridRow
from .context import FormalContext
from .diagnostic import CrossSectionRow, PrevalenceRow, RuleCluster, TopicProfile
from .errors import ContractViolation
from .ingest import SENTIMENTS, TRAIT_FIELDS
from .rules import AssociationRule, RuleGridRow

CONTEXT_FORMAT = "discourse-fca-context"

PREVALENCE_HEADER = ["attribute", "HI", "VI", "delta_VI_minus_HI"]
CONCEPT_GRID_HEADER = ["multilingual", "intent", "support", "VI_raw", "VI_filtered", "HI_raw", "HI_filtered"]
RULES_HEADER = ["group", "cluster", "premise", "consequent", "supp", "conf", "lift"]
RULE_SUMMARY_HEADER = ["group", "metric", "mean", "median", "max"]
RULE_GRID_HEADER = ["minsup", "minconf", "HI_rules", "VI_rules"]
CROSSSECTION_HEADER = ["group", "sentiment", "E", "N", "A", "C", "O"]
TOPIC_PROFILE_HEADER = ["group", "topic", "n", "positive", "neutral", "negative", *TRAIT_FIELDS]
HISTOGRAM_HEADER = ["category", "attribute", "count"]

# Cross-section column order (E, N, A, C, O) as indices into Traits.
_CROSS_ORDER = (2, 4, 3, 1, 0)


def fmt(x: float | None) -> str:
    """Six significant digits; the one float format used in every output."""
    if x is None:
        return ""
    return f"{x:.6g}"


def jnum(x: float | None) -> float | None:
    return None if x is None else float(fmt(x))


def context_to_dict(ctx: FormalContext) -> dict:
    width = max(1, (ctx.n_attributes + 3) // 4)
    return {
        "format": CONTEXT_FORMAT,
        "version": 1,
        "attributes": list(ctx.attribute_names),
        "objects": list(ctx.object_labels),
        "rows": [f"{r:0{width}x}" for r in ctx.rows],
    }


def context_from_dict(d: dict) -> FormalContext:
    if d.get("format") != CONTEXT_FORMAT or d.get("version") != 1:
        raise ContractViolation("not a version-1 discourse-fca context document")
    try:
        rows = tuple(int(h, 16) for h in d["rows"])
    except (KeyError, TypeError, ValueError):
        raise ContractViolation("context rows must be hex strings") from None
    return FormalContext(tuple(d["objects"]), tuple(d["attributes"]), rows)


def write_context(path: Path, ctx: FormalContext) -> None:
    write_json(path, context_to_dict(ctx))


def read_context(path: Path) -> FormalContext:
    with open(path, encoding="utf-8") as fh:
        return context_from_dict(json.load(fh))


def write_json(path: Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows), encoding="utf-8")


# -- table rows ---------------------------------------------------------------


def prevalence_rows(rows: Sequence[PrevalenceRow]) -> list[list[str]]:
    """``a`` is HI and ``b`` is VI, so delta reads VI minus HI."""
    return [[r.attribute.name, fmt(r.prevalence_a), fmt(r.prevalence_b), fmt(r.delta)] for r in rows]


def concept_grid_rows(grid_vi: Sequence[GridRow] | None, grid_hi: Sequence[GridRow] | None) -> list[list[str]]:
    base = grid_vi if grid_vi is not None else grid_hi
    out = []
    for i, g in enumerate(base):
        vi = grid_vi[i] if grid_vi is not None else None
        hi = grid_hi[i] if grid_hi is not None else None
        out.append(
            [
                "No",
                f">={g.min_intent_size}",
                fmt(g.min_support),
                "" if vi is None else vi.raw_count,
                "" if vi is None else vi.filtered_count,
                "" if hi is None else hi.raw_count,
                "" if hi is None else hi.filtered_count,
            ]
        )
    return out


def rule_rows(group: str, ctx: FormalContext, clusters: Sequence[RuleCluster]) -> list[list[str]]:
    out = []
    for cl in clusters:
        label = cl.anchor.name if cl.anchor is not None else "personality-only"
        for r in sorted(cl.rules, key=AssociationRule.sort_key):
            premise, consequent = r.names(ctx)
            out.append(
                [group, label, " & ".join(premise), " & ".join(consequent),
                 fmt(r.support), fmt(r.confidence), fmt(r.lift)]
            )
    return out


def rule_summary_rows(group: str, summary: dict | None) -> list[list[str]]:
    if summary is None:
        return []
    return [
        [group, metric, fmt(s["mean"]), fmt(s["median"]), fmt(s["max"])]
        for metric, s in summary.items()
    ]


def rule_grid_rows(grid: Sequence[RuleGridRow]) -> list[list[str]]:
    """Grid computed with ``ctx_a`` = HI and ``ctx_b`` = VI."""
    return [[fmt(g.thresholds.min_support), fmt(g.thresholds.min_confidence), g.count_a, g.count_b] for g in grid]


def crosssection_rows(rows: Sequence[CrossSectionRow]) -> list[list[str]]:
    out = []
    for r in rows:
        vals = [""] * 5 if r.mean_traits is None else [fmt(r.mean_traits[i]) for i in _CROSS_ORDER]
        out.append([r.condition, r.sentiment, *vals])
    return out


def topic_profile_rows(group: str, profiles: Sequence[TopicProfile]) -> list[list[str]]:
    return [
        [group, p.topic, p.n, *(fmt(p.sentiment_fractions[s]) for s in SENTIMENTS), *(fmt(v) for v in p.mean_traits)]
        for p in profiles
    ]


def concept_to_dict(ctx: FormalContext, c: FormalConcept) -> dict:
    return {
        "intent": list(ctx.attr_names(c.intent)),
        "extent": list(ctx.obj_labels(c.extent)),
        "support": jnum(c.support),
    }


def rule_to_dict(ctx: FormalContext, r: AssociationRule) -> dict:
    premise, consequent = r.names(ctx)
    return {
        "antecedent": list(premise),
        "consequent": list(consequent),
        "support": jnum(r.support),
        "confidence": jnum(r.confidence),
        "lift": jnum(r.lift),
        "count": r.count_xy,
    }
