"""Cross-condition comparison: marginals, intent differencing, rule clusters, topic profiles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .concepts import FormalConcept, canonical_key
from .context import AttributeId, FormalContext, iter_bits
from .errors import AmbiguousAnchor, VocabularyMismatch
from .ingest import CONDITIONS, SENTIMENTS, TOPIC_INDEX, CommentRecord, Traits
from .rules import AssociationRule

log = logging.getLogger(__name__)

TOPIC_ATTRS = frozenset(TOPIC_INDEX.values())


@dataclass(frozen=True)
class PrevalenceRow:
    """``delta`` is the exact rational difference rounded once, so equal deltas compare equal."""

    attribute: AttributeId
    prevalence_a: float
    prevalence_b: float
    delta: float


@dataclass(frozen=True)
class IntentComparison:
    shared: list[int]
    only_a: list[int]
    only_b: list[int]


@dataclass(frozen=True)
class RuleCluster:
    anchor: AttributeId | None
    rules: list[AssociationRule]


@dataclass(frozen=True)
class TopicProfile:
    topic: str
    sentiment_fractions: dict[str, float]
    mean_traits: Traits
    n: int


@dataclass(frozen=True)
class CrossSectionRow:
    condition: str
    sentiment: str
    mean_traits: Traits | None
    n: int


def marginal_prevalence(ctx_a: FormalContext, ctx_b: FormalContext) -> list[PrevalenceRow]:
    """Per-attribute prevalence in both contexts, sorted by ``b - a`` descending."""
    if not ctx_a.same_vocabulary(ctx_b):
        raise VocabularyMismatch("contexts do not share an attribute vocabulary")
    na, nb = ctx_a.n_objects, ctx_b.n_objects
    keyed = []
    for attr in ctx_a.attributes:
        ca, cb = ctx_a.column_count(attr.index), ctx_b.column_count(attr.index)
        pa, pb = ca / na, cb / nb
        exact = Fraction(cb, nb) - Fraction(ca, na)
        keyed.append((-exact, attr.index, PrevalenceRow(attr, pa, pb, float(exact))))
    keyed.sort(key=lambda t: t[:2])
    return [row for *_, row in keyed]


def compare_intents(
    concepts_a: Iterable[FormalConcept | int],
    concepts_b: Iterable[FormalConcept | int],
) -> IntentComparison:
    """Partition intents into shared, a-only and b-only by set equality."""
    ia = {c.intent if isinstance(c, FormalConcept) else c for c in concepts_a}
    ib = {c.intent if isinstance(c, FormalConcept) else c for c in concepts_b}
    return IntentComparison(
        shared=sorted(ia & ib, key=canonical_key),
        only_a=sorted(ia - ib, key=canonical_key),
        only_b=sorted(ib - ia, key=canonical_key),
    )


def concept_attribute_histogram(
    concepts: Iterable[FormalConcept | int],
    attributes: Sequence[str],
) -> list[tuple[str, int]]:
    """How many concept intents contain each attribute (raw counts, descending)."""
    counts = [0] * len(attributes)
    for c in concepts:
        intent = c.intent if isinstance(c, FormalConcept) else c
        for m in iter_bits(intent):
            counts[m] += 1
    order = sorted(range(len(attributes)), key=lambda i: (-counts[i], i))
    return [(attributes[i], counts[i]) for i in order]


def cluster_rules(
    rules: Sequence[AssociationRule],
    topic_attrs: Iterable[AttributeId | int] = TOPIC_ATTRS,
    attributes: Sequence[str] | None = None,
    strict: bool = True,
) -> list[RuleCluster]:
    """Group rules by the topic attribute in their antecedent.

    Rules with no topic in the antecedent form the ``anchor=None`` cluster.
    Two or more topics in one antecedent raise AmbiguousAnchor unless
    ``strict`` is off, in which case the lowest index wins.
    """
    topic_mask = 0
    for t in topic_attrs:
        topic_mask |= 1 << (t.index if isinstance(t, AttributeId) else t)
    groups: dict[int | None, list[AssociationRule]] = {}
    for r in rules:
        hits = r.antecedent & topic_mask
        if not hits:
            anchor = None
        else:
            if hits & (hits - 1) and strict:
                raise AmbiguousAnchor(f"antecedent has topics {list(iter_bits(hits))}")
            anchor = (hits & -hits).bit_length() - 1
        groups.setdefault(anchor, []).append(r)

    def name(i: int) -> str:
        return attributes[i] if attributes is not None else str(i)

    ordered = sorted(groups, key=lambda a: (-len(groups[a]), a is None, a if a is not None else 0))
    return [
        RuleCluster(None if a is None else AttributeId(a, name(a)), groups[a])
        for a in ordered
    ]


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def topic_profiles(
    records: Sequence[CommentRecord],
    topics: Sequence[str],
) -> tuple[list[TopicProfile], list[str]]:
    """Sentiment split and mean traits per topic, without time aggregation.

    Returns the profiles of topics that occur plus the list of absent topics.
    """
    profiles, absent = [], []
    for topic in topics:
        members = [r for r in records if r.topic == topic]
        if not members:
            log.warning("topic %s absent from %d records", topic, len(records))
            absent.append(topic)
            continue
        n = len(members)
        fractions = {s: sum(1 for r in members if r.sentiment == s) / n for s in SENTIMENTS}
        traits = Traits(*(_mean([r.traits[i] for r in members]) for i in range(5)))
        profiles.append(TopicProfile(topic, fractions, traits, n))
    return profiles, absent


def sentiment_trait_crosssection(records: Sequence[CommentRecord]) -> list[CrossSectionRow]:
    """Mean traits per (condition, sentiment); HI before VI within each sentiment."""
    rows = []
    for sentiment in SENTIMENTS:
        for condition in sorted(CONDITIONS):
            members = [r.traits for r in records if r.condition == condition and r.sentiment == sentiment]
            if members:
                means = Traits(*(_mean([t[i] for t in members]) for i in range(5)))
            else:
                means = None
            rows.append(CrossSectionRow(condition, sentiment, means, len(members)))
    return rows
