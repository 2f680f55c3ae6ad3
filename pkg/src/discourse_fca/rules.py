"""Comment-level association rules: metrics, level-wise mining, threshold grids."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._exact import as_fraction, ratio_above, ratio_at_least
from .context import AttributeId, FormalContext, bits_to_tuple, derive_objects
from .errors import (
    DisjointnessViolation,
    EmptyAntecedentCover,
    EmptyConsequentCover,
    EmptyRuleSet,
    RuleLimitExceeded,
    VocabularyMismatch,
)

DEFAULT_MAX_RULES = 10_000_000


@dataclass(frozen=True)
class RuleThresholds:
    min_support: float = 0.01
    min_confidence: float = 0.8
    min_lift: float = 1.2
    max_antecedent: int = 3
    consequent_size: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_support <= 1.0:
            raise ValueError(f"min_support must lie in [0, 1], got {self.min_support}")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ValueError(f"min_confidence must lie in [0, 1], got {self.min_confidence}")
        if self.min_lift < 0:
            raise ValueError("min_lift must be non-negative")
        if self.max_antecedent < 1 or self.consequent_size < 1:
            raise ValueError("max_antecedent and consequent_size must be >= 1")


@dataclass(frozen=True)
class AssociationRule:
    """``antecedent => consequent`` with the counts its metrics come from."""

    antecedent: int
    consequent: int
    count_xy: int
    count_x: int
    count_y: int
    n_objects: int

    @property
    def support(self) -> float:
        return self.count_xy / self.n_objects

    @property
    def confidence(self) -> float:
        return self.count_xy / self.count_x

    @property
    def lift(self) -> float:
        return self.confidence / (self.count_y / self.n_objects)

    @property
    def exact_lift(self) -> Fraction:
        return Fraction(self.count_xy * self.n_objects, self.count_x * self.count_y)

    def sort_key(self):
        return (
            -self.exact_lift,
            -self.count_xy,
            bits_to_tuple(self.antecedent),
            bits_to_tuple(self.consequent),
        )

    def names(self, ctx: FormalContext) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return ctx.attr_names(self.antecedent), ctx.attr_names(self.consequent)


@dataclass(frozen=True)
class RuleGridRow:
    thresholds: RuleThresholds
    count_a: int
    count_b: int


def rule_metrics(ctx: FormalContext, x: int, y: int) -> tuple[float, float, float]:
    """(support, confidence, lift) of ``x => y`` by direct cover counting."""
    if not x or not y:
        raise ValueError("antecedent and consequent must be non-empty")
    if x & y:
        raise DisjointnessViolation(f"{ctx.attr_names(x & y)} on both sides")
    cover_x = derive_objects(ctx, x)
    cover_y = derive_objects(ctx, y)
    if not cover_x:
        raise EmptyAntecedentCover(f"no object has {ctx.attr_names(x)}")
    if not cover_y:
        raise EmptyConsequentCover(f"no object has {ctx.attr_names(y)}")
    rule = AssociationRule(
        x, y, (cover_x & cover_y).bit_count(), cover_x.bit_count(), cover_y.bit_count(), ctx.n_objects
    )
    return rule.support, rule.confidence, rule.lift


def _frequent_levels(ctx: FormalContext, min_count: Fraction, depth: int, cap: int):
    """Level-wise frequent itemsets: ``levels[k]`` maps sorted index tuples to covers."""
    n = ctx.n_objects

    def frequent(cover: int) -> bool:
        c = cover.bit_count()
        return c > 0 and Fraction(c, n) >= min_count

    levels: list[dict[tuple[int, ...], int]] = [{(): ctx.all_objects}]
    levels.append({(m,): col for m, col in enumerate(ctx.columns) if frequent(col)})
    total = len(levels[1])
    for k in range(2, depth + 1):
        prev = levels[k - 1]
        keys = sorted(prev)
        nxt: dict[tuple[int, ...], int] = {}
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                if a[:-1] != b[:-1]:
                    break
                cand = a + (b[-1],)
                if any(cand[:j] + cand[j + 1:] not in prev for j in range(k - 2)):
                    continue
                cover = prev[a] & levels[1][(b[-1],)]
                if frequent(cover):
                    nxt[cand] = cover
        total += len(nxt)
        if total > cap:
            raise RuleLimitExceeded(f"more than {cap} frequent itemsets")
        levels.append(nxt)
        if not nxt:
            break
    return levels


def mine_rules(
    ctx: FormalContext,
    th: RuleThresholds = RuleThresholds(),
    max_rules: int = DEFAULT_MAX_RULES,
) -> list[AssociationRule]:
    """All rules meeting ``th``, sorted by lift desc, support desc, then attribute order.

    Antecedents are generated breadth-first; an itemset whose cover falls
    below min_support is never extended, since no superset can recover it.
    Support and confidence filters are inclusive, the lift filter is strict.
    """
    min_sup = as_fraction(th.min_support)
    depth = max(th.max_antecedent, th.consequent_size)
    levels = _frequent_levels(ctx, min_sup, depth, max_rules)
    n = ctx.n_objects
    consequents = levels[th.consequent_size] if th.consequent_size < len(levels) else {}
    rules: list[AssociationRule] = []
    for size in range(1, min(th.max_antecedent, len(levels) - 1) + 1):
        for xs, cover_x in levels[size].items():
            x = sum(1 << i for i in xs)
            cx = cover_x.bit_count()
            for ys, cover_y in consequents.items():
                y = sum(1 << i for i in ys)
                if x & y:
                    continue
                cxy = (cover_x & cover_y).bit_count()
                if cxy == 0 or not ratio_at_least(cxy, n, min_sup):
                    continue
                if not ratio_at_least(cxy, cx, th.min_confidence):
                    continue
                cy = cover_y.bit_count()
                if not ratio_above(cxy * n, cx * cy, th.min_lift):
                    continue
                rules.append(AssociationRule(x, y, cxy, cx, cy, n))
                if len(rules) > max_rules:
                    raise RuleLimitExceeded(f"more than {max_rules} rules")
    rules.sort(key=AssociationRule.sort_key)
    return rules


def _count_pair(ctx_a, ctx_b, th, max_rules):
    return th, len(mine_rules(ctx_a, th, max_rules)), len(mine_rules(ctx_b, th, max_rules))


def robustness_grid(
    ctx_a: FormalContext,
    ctx_b: FormalContext,
    grid: Sequence[RuleThresholds],
    workers: int = 1,
    max_rules: int = DEFAULT_MAX_RULES,
) -> list[RuleGridRow]:
    if not ctx_a.same_vocabulary(ctx_b):
        raise VocabularyMismatch("contexts do not share an attribute vocabulary")
    if workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(_count_pair, [ctx_a] * len(grid), [ctx_b] * len(grid), grid, [max_rules] * len(grid))
            )
    else:
        results = [_count_pair(ctx_a, ctx_b, th, max_rules) for th in grid]
    return [RuleGridRow(th, a, b) for th, a, b in results]


def default_rule_grid(min_lift: float = 1.2) -> list[RuleThresholds]:
    """minsup {0.005, 0.01, 0.02} x minconf {0.8, 0.9}."""
    return [
        RuleThresholds(s, c, min_lift)
        for s in (0.005, 0.01, 0.02)
        for c in (0.8, 0.9)
    ]


def attribute_participation(rules: Sequence[AssociationRule], attr: AttributeId | int) -> int:
    """Number of rules mentioning ``attr`` on either side."""
    bit = 1 << (attr.index if isinstance(attr, AttributeId) else attr)
    return sum(1 for r in rules if (r.antecedent | r.consequent) & bit)


def rule_summary(rules: Sequence[AssociationRule]) -> dict[str, dict[str, float]]:
    if not rules:
        raise EmptyRuleSet("cannot summarise an empty rule list")
    out = {}
    for metric in ("support", "confidence", "lift"):
        vals = [getattr(r, metric) for r in rules]
        out[metric] = {
            "mean": statistics.fmean(vals),
            "median": statistics.median(vals),
            "max": max(vals),
        }
    return out

