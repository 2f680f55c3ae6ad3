"""Brute-force reference computations, written against plain Python sets.

Nothing here touches the bit-vector code paths under test.
"""

from fractions import Fraction
from itertools import combinations


def rows_as_sets(ctx):
    return [frozenset(j for j in range(ctx.n_attributes) if row >> j & 1) for row in ctx.rows]


def extent_of(rows, attrs):
    return frozenset(g for g, r in enumerate(rows) if attrs <= r)


def intent_of(rows, objs, n_attr):
    out = set(range(n_attr))
    for g in objs:
        out &= rows[g]
    return frozenset(out)


def brute_concepts(ctx):
    """{(extent, intent)} from closing every one of the 2^|M| attribute subsets."""
    rows = rows_as_sets(ctx)
    m = ctx.n_attributes
    found = set()
    for k in range(m + 1):
        for attrs in combinations(range(m), k):
            ext = extent_of(rows, frozenset(attrs))
            found.add((ext, intent_of(rows, ext, m)))
    return found


def brute_rules(ctx, min_support, min_confidence, min_lift, max_antecedent=3):
    """{(antecedent, consequent): (count_xy, count_x, count_y)} for singleton consequents."""
    rows = rows_as_sets(ctx)
    n, m = len(rows), ctx.n_attributes
    memo = {}

    def count(items):
        if items not in memo:
            memo[items] = sum(1 for r in rows if items <= r)
        return memo[items]

    out = {}
    for k in range(1, max_antecedent + 1):
        for xs in combinations(range(m), k):
            x = frozenset(xs)
            for y in range(m):
                if y in x:
                    continue
                ys = frozenset([y])
                cxy, cx, cy = count(x | ys), count(x), count(ys)
                if cxy == 0:
                    continue
                if Fraction(cxy, n) < Fraction(repr(min_support)):
                    continue
                if Fraction(cxy, cx) < Fraction(repr(min_confidence)):
                    continue
                if Fraction(cxy * n, cx * cy) <= Fraction(repr(min_lift)):
                    continue
                out[(x, ys)] = (cxy, cx, cy)
    return out


def iso_week(d):
    """ISO-8601 (year, week) via the Thursday rule."""
    from datetime import timedelta

    thursday = d + timedelta(days=3 - d.weekday())
    return thursday.year, (thursday.timetuple().tm_yday - 1) // 7 + 1
