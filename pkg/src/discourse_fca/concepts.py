"""Exact concept enumeration (Close-by-One) and iceberg filtering."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from ._exact import ratio_at_least
from .context import FormalContext, bits_to_tuple, derive_attrs
from .errors import ConceptLimitExceeded, LatticeError

DEFAULT_MAX_CONCEPTS = 10_000_000


@dataclass(frozen=True)
class FormalConcept:
    extent: int
    intent: int
    n_objects: int

    @property
    def extent_size(self) -> int:
        return self.extent.bit_count()

    @property
    def intent_size(self) -> int:
        return self.intent.bit_count()

    @property
    def support(self) -> float:
        return self.extent_size / self.n_objects


@dataclass(frozen=True)
class IcebergParams:
    min_support: float = 0.20
    min_intent_size: int = 3

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_support <= 1.0:
            raise ValueError(f"min_support must lie in [0, 1], got {self.min_support}")
        if self.min_intent_size < 0:
            raise ValueError("min_intent_size must be non-negative")


@dataclass(frozen=True)
class GridRow:
    min_support: float
    min_intent_size: int
    raw_count: int
    filtered_count: int


def canonical_key(intent: int) -> tuple[int, tuple[int, ...]]:
    return intent.bit_count(), bits_to_tuple(intent)


def _intent_of(extent: int, columns: Sequence[int]) -> int:
    out = 0
    for m, col in enumerate(columns):
        if extent & col == extent:
            out |= 1 << m
    return out


def _cbo(extent, intent, start, columns, out, cap):
    out.append((extent, intent))
    if len(out) > cap:
        raise ConceptLimitExceeded(f"more than {cap} concepts")
    for j in range(start, len(columns)):
        if intent >> j & 1:
            continue
        new_extent = extent & columns[j]
        new_intent = _intent_of(new_extent, columns)
        below = (1 << j) - 1
        if new_intent & below == intent & below:
            _cbo(new_extent, new_intent, j + 1, columns, out, cap)


def _branch(columns, extent, intent, j, cap):
    # subtree rooted at the top concept's j-th extension, or [] if not canonical
    new_extent = extent & columns[j]
    new_intent = _intent_of(new_extent, columns)
    below = (1 << j) - 1
    if new_intent & below != intent & below:
        return []
    out: list[tuple[int, int]] = []
    _cbo(new_extent, new_intent, j + 1, columns, out, cap)
    return out


def enumerate_concepts(
    ctx: FormalContext,
    max_concepts: int = DEFAULT_MAX_CONCEPTS,
    workers: int = 1,
) -> list[FormalConcept]:
    """Return every formal concept of ``ctx`` exactly once, canonically sorted.

    Order is intent size ascending, then the sorted tuple of intent indices.
    With ``workers > 1`` the top-level Close-by-One branches are distributed
    over processes; the final sort makes the result independent of that.
    """
    columns = ctx.columns
    top_extent = ctx.all_objects
    top_intent = derive_attrs(ctx, top_extent)
    pairs: list[tuple[int, int]] = [(top_extent, top_intent)]
    branches = [j for j in range(ctx.n_attributes) if not top_intent >> j & 1]
    if workers > 1 and len(branches) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_branch, columns, top_extent, top_intent, j, max_concepts)
                for j in branches
            ]
            for f in futures:
                pairs.extend(f.result())
                if len(pairs) > max_concepts:
                    raise ConceptLimitExceeded(f"more than {max_concepts} concepts")
    else:
        for j in branches:
            pairs.extend(_branch(columns, top_extent, top_intent, j, max_concepts))
            if len(pairs) > max_concepts:
                raise ConceptLimitExceeded(f"more than {max_concepts} concepts")
    pairs.sort(key=lambda p: canonical_key(p[1]))
    n = ctx.n_objects
    return [FormalConcept(e, i, n) for e, i in pairs]


def iceberg_filter(concepts: Sequence[FormalConcept], params: IcebergParams) -> list[FormalConcept]:
    return [
        c
        for c in concepts
        if c.intent_size >= params.min_intent_size
        and ratio_at_least(c.extent_size, c.n_objects, params.min_support)
    ]


def concept_count_grid(
    ctx: FormalContext,
    support_values: Sequence[float],
    intent_values: Sequence[int],
    concepts: Sequence[FormalConcept] | None = None,
    max_concepts: int = DEFAULT_MAX_CONCEPTS,
) -> list[GridRow]:
    """Raw and iceberg-filtered concept counts over a threshold grid.

    Pass ``concepts`` to reuse an enumeration that was already done.
    """
    if not support_values or not intent_values:
        raise ValueError("grid parameter lists must be non-empty")
    if concepts is None:
        concepts = enumerate_concepts(ctx, max_concepts=max_concepts)
    raw = len(concepts)
    rows = []
    for s in support_values:
        for k in intent_values:
            kept = iceberg_filter(concepts, IcebergParams(s, k))
            rows.append(GridRow(s, k, raw, len(kept)))
    return rows


def _check_complete(concepts: Sequence[FormalConcept]) -> None:
    extents = [c.extent for c in concepts]
    intents = [c.intent for c in concepts]
    if len(set(intents)) != len(intents):
        raise LatticeError("duplicate intents")
    if len(set(extents)) != len(extents):
        raise LatticeError("duplicate extents")
    union = 0
    for e in extents:
        union |= e
    if union not in set(extents):
        raise LatticeError("no top concept")
    known = set(extents)
    for i, a in enumerate(extents):
        for b in extents[i + 1:]:
            if a & b not in known:
                raise LatticeError("concept set is not closed under meets (missing closure)")


def covering_edges(concepts: Sequence[FormalConcept]) -> list[tuple[int, int]]:
    """Hasse diagram of extent inclusion as ``(parent_index, child_index)`` pairs."""
    if not concepts:
        return []
    _check_complete(concepts)
    order = sorted(range(len(concepts)), key=lambda i: -concepts[i].extent_size)
    edges = []
    for p in range(len(concepts)):
        ep = concepts[p].extent
        covers: list[int] = []
        for c in order:
            ec = concepts[c].extent
            if ec == ep or ec & ep != ec:
                continue
            if any(ec & concepts[d].extent == ec for d in covers):
                continue
            covers.append(c)
        edges.extend((p, c) for c in covers)
    edges.sort()
    return edges
