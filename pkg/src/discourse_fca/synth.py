"""Synthetic contexts and corpora with controlled marginals and couplings.

``generate_context_pair`` is the matched-marginals construction: context A
realises the coupling plan, context B is A with every column independently
permuted, so each attribute keeps exactly the same number of ones while the
co-occurrence structure is destroyed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from importlib import resources
from typing import Sequence

import numpy as np

from .context import FormalContext, bitset
from .errors import InfeasibleSpec
from .ingest import SENTIMENTS, TOPICS, TRAITS, VOCABULARY, CommentRecord, Traits


@dataclass(frozen=True)
class Coupling:
    attributes: tuple[str, ...]
    joint: float


@dataclass(frozen=True)
class SynthSpec:
    n_objects: int
    target_marginals: dict[str, float]
    coupling_plan: tuple[Coupling, ...] = ()
    seed: int = 0
    vocabulary: tuple[str, ...] = VOCABULARY
    n_weeks: int = 52
    comments_per_week: int = 40
    start: date = date(2024, 1, 1)

    def __post_init__(self) -> None:
        if self.n_objects < 1:
            raise InfeasibleSpec("n_objects must be positive")
        if not 0 <= self.seed < 2**64:
            raise InfeasibleSpec("seed must be a 64-bit unsigned integer")
        known = set(self.vocabulary)
        for name, p in self.target_marginals.items():
            if name not in known:
                raise InfeasibleSpec(f"marginal for unknown attribute {name!r}")
            if not 0.0 <= p <= 1.0:
                raise InfeasibleSpec(f"marginal of {name} outside [0, 1]: {p}")
        for c in self.coupling_plan:
            if len(c.attributes) < 2:
                raise InfeasibleSpec("a coupling needs at least two attributes")
            for a in c.attributes:
                if a not in known:
                    raise InfeasibleSpec(f"coupling names unknown attribute {a!r}")
            upper = min(self.marginal(a) for a in c.attributes)
            if c.joint > upper + 1e-12:
                raise InfeasibleSpec(
                    f"Frechet upper bound: joint {c.joint} of {c.attributes} exceeds min marginal {upper}"
                )
            if c.joint < 0:
                raise InfeasibleSpec("joint target must be non-negative")

    def marginal(self, name: str) -> float:
        return self.target_marginals.get(name, 0.0)

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        couplings = tuple(
            Coupling(tuple(c["attributes"]), float(c["joint"])) for c in d.get("coupling_plan", [])
        )
        kw = {}
        if "vocabulary" in d:
            kw["vocabulary"] = tuple(d["vocabulary"])
        for key in ("n_weeks", "comments_per_week"):
            if key in d:
                kw[key] = int(d[key])
        if "start" in d:
            kw["start"] = date.fromisoformat(d["start"])
        return cls(
            n_objects=int(d["n_objects"]),
            target_marginals={k: float(v) for k, v in d.get("target_marginals", {}).items()},
            coupling_plan=couplings,
            seed=int(d.get("seed", 0)),
            **kw,
        )

    def to_dict(self) -> dict:
        return {
            "n_objects": self.n_objects,
            "seed": self.seed,
            "vocabulary": list(self.vocabulary),
            "target_marginals": dict(self.target_marginals),
            "coupling_plan": [
                {"attributes": list(c.attributes), "joint": c.joint} for c in self.coupling_plan
            ],
            "n_weeks": self.n_weeks,
            "comments_per_week": self.comments_per_week,
            "start": self.start.isoformat(),
        }


def load_spec(path) -> SynthSpec:
    with open(path, encoding="utf-8") as fh:
        return SynthSpec.from_dict(json.load(fh))


def _bundled(name: str) -> SynthSpec:
    text = resources.files("discourse_fca").joinpath("data").joinpath(name).read_text(encoding="utf-8")
    return SynthSpec.from_dict(json.loads(text))


def demo_pair_spec() -> SynthSpec:
    """Appearance-style topic coupled to positive sentiment (~0.17 prevalence)."""
    return _bundled("demo_pair_spec.json")


def demo_corpus_spec() -> SynthSpec:
    return _bundled("demo_corpus_spec.json")


def _count(p: float, n: int) -> int:
    return int(math.floor(p * n + 0.5))


def generate_context_pair(spec: SynthSpec) -> tuple[FormalContext, FormalContext]:
    """Coupled context A and its column-shuffled twin B with equal column sums."""
    n = spec.n_objects
    vocab = list(spec.vocabulary)
    index = {a: j for j, a in enumerate(vocab)}
    counts = [_count(spec.marginal(a), n) for a in vocab]
    used: set[str] = set()
    for c in spec.coupling_plan:
        clash = used.intersection(c.attributes)
        if clash:
            raise InfeasibleSpec(f"attribute(s) {sorted(clash)} appear in more than one coupling")
        used.update(c.attributes)
        joint = _count(c.joint, n)
        members = [counts[index[a]] for a in c.attributes]
        if joint > min(members):
            raise InfeasibleSpec(f"Frechet upper bound violated for {c.attributes}")
        # remainders are placed on disjoint objects so the joint count is exact
        if sum(members) - (len(members) - 1) * joint > n:
            lowest = math.ceil((sum(members) - n) / (len(members) - 1))
            raise InfeasibleSpec(
                f"Frechet lower bound violated for {c.attributes}: joint count {joint} < {lowest}"
            )

    rng = np.random.default_rng(spec.seed)
    a = np.zeros((n, len(vocab)), dtype=bool)
    for c in spec.coupling_plan:
        joint = _count(c.joint, n)
        perm = rng.permutation(n)
        a[np.ix_(perm[:joint], [index[x] for x in c.attributes])] = True
        pos = joint
        for x in c.attributes:
            extra = counts[index[x]] - joint
            a[perm[pos:pos + extra], index[x]] = True
            pos += extra
    for j, name in enumerate(vocab):
        if name not in used:
            a[rng.permutation(n)[: counts[j]], j] = True
    b = np.empty_like(a)
    for j in range(len(vocab)):
        b[:, j] = a[rng.permutation(n), j]

    labels = tuple(f"o{i:06d}" for i in range(n))
    return _to_context(a, labels, vocab), _to_context(b, labels, vocab)


def _to_context(matrix: np.ndarray, labels, vocab) -> FormalContext:
    rows = tuple(bitset(np.flatnonzero(r).tolist()) for r in matrix)
    return FormalContext(labels, tuple(vocab), rows)


def _family(spec: SynthSpec, prefix: str, labels: Sequence[str]) -> np.ndarray:
    names = [f"{prefix}{x}" for x in labels]
    given = {k: spec.target_marginals[k] for k in names if k in spec.target_marginals}
    missing = [k for k in names if k not in given]
    rest = 1.0 - sum(given.values())
    if rest < -1e-9 or (not missing and abs(rest) > 1e-6):
        raise InfeasibleSpec(f"{prefix}* marginals sum to {1.0 - rest}, not 1")
    fill = max(rest, 0.0) / len(missing) if missing else 0.0
    return np.array([given.get(k, fill) for k in names], dtype=float)


def _joint_table(p_topic, p_sent, fixed: dict[tuple[int, int], float]) -> np.ndarray:
    """Topic x sentiment table with the given margins and pinned cells.

    Iterative proportional fitting over the free cells.
    """
    table = np.outer(p_topic, p_sent)
    mask = np.zeros_like(table, dtype=bool)
    for (t, s), v in fixed.items():
        table[t, s] = v
        mask[t, s] = True
    free = ~mask
    for _ in range(5000):
        for axis, target in ((1, p_topic), (0, p_sent)):
            pinned = np.where(mask, table, 0.0).sum(axis=axis)
            current = np.where(free, table, 0.0).sum(axis=axis)
            want = target - pinned
            if np.any(want < -1e-12):
                raise InfeasibleSpec("pinned joint cells exceed a marginal")
            scale = np.divide(want, current, out=np.zeros_like(want), where=current > 0)
            if axis == 1:
                table = np.where(free, table * scale[:, None], table)
            else:
                table = np.where(free, table * scale[None, :], table)
        err = max(
            np.abs(table.sum(axis=1) - p_topic).max(),
            np.abs(table.sum(axis=0) - p_sent).max(),
        )
        if err < 1e-12:
            return table
    raise InfeasibleSpec(f"coupling plan has no table matching the marginals (residual {err:.2e})")


def generate_corpus(
    spec: SynthSpec,
    condition: str = "VI",
    coupled: bool = True,
    influencer_id: str = "synthetic",
    comments_per_week: int | Sequence[int] | None = None,
    n_weeks: int | None = None,
) -> list[CommentRecord]:
    """Enriched comment records drawn from the spec's topic/sentiment margins.

    Couplings must pair one ``topic_*`` with one ``sentiment_*`` attribute and
    pin that cell of the topic x sentiment table (``coupled=False`` drops
    them, keeping the margins). Trait scores follow a stratified design: in
    every topic x sentiment cell each block of 32 comments covers all 32
    high/low patterns once, so trait bins carry no sampling noise relative to
    sentiment and topic.
    """
    n_weeks = spec.n_weeks if n_weeks is None else n_weeks
    per_week = spec.comments_per_week if comments_per_week is None else comments_per_week
    schedule = [per_week] * n_weeks if isinstance(per_week, int) else list(per_week)
    if len(schedule) != n_weeks or any(k < 0 for k in schedule):
        raise InfeasibleSpec("schedule must give a non-negative count for every week")

    p_topic = _family(spec, "topic_", TOPICS)
    p_sent = _family(spec, "sentiment_", SENTIMENTS)
    fixed = {}
    if coupled:
        for c in spec.coupling_plan:
            topics = [a for a in c.attributes if a.startswith("topic_")]
            sents = [a for a in c.attributes if a.startswith("sentiment_")]
            if len(c.attributes) != 2 or len(topics) != 1 or len(sents) != 1:
                raise InfeasibleSpec(f"corpus couplings must pair a topic with a sentiment: {c.attributes}")
            t = TOPICS.index(topics[0][len("topic_"):])
            s = SENTIMENTS.index(sents[0][len("sentiment_"):])
            fixed[(t, s)] = c.joint
    table = _joint_table(p_topic, p_sent, fixed)

    cond_index = {"VI": 0, "HI": 1}.get(condition, 2)
    rng = np.random.default_rng([spec.seed, cond_index])
    total = sum(schedule)
    probs = table.ravel() / table.sum()
    cells = rng.choice(probs.size, size=total, p=probs)

    patterns = np.zeros(total, dtype=np.int64)
    for cell in np.unique(cells):
        members = np.flatnonzero(cells == cell)
        for start in range(0, members.size, 32):
            block = members[start:start + 32]
            patterns[block] = rng.permutation(32)[: block.size]
    high = rng.uniform(0.55, 0.95, size=(total, len(TRAITS)))
    low = rng.uniform(0.05, 0.45, size=(total, len(TRAITS)))

    week0 = datetime.combine(spec.start, time(0, 0), tzinfo=timezone.utc)
    records = []
    i = 0
    for w, k in enumerate(schedule):
        offsets = np.sort(rng.integers(0, 7 * 86400, size=k))
        for off in offsets:
            t, s = divmod(int(cells[i]), len(SENTIMENTS))
            bits = int(patterns[i])
            traits = Traits(
                *(
                    float(round(high[i, j] if bits >> j & 1 else low[i, j], 6))
                    for j in range(len(TRAITS))
                )
            )
            records.append(
                CommentRecord(
                    comment_id=f"{condition.lower()}-{i:06d}",
                    influencer_id=influencer_id,
                    condition=condition,
                    timestamp=week0 + timedelta(weeks=w, seconds=int(off)),
                    sentiment=SENTIMENTS[s],
                    topic=TOPICS[t],
                    traits=traits,
                )
            )
            i += 1
    return records


def generate_corpus_pair(spec: SynthSpec) -> list[CommentRecord]:
    """VI records with the coupling plan applied, HI records with matched margins only."""
    return generate_corpus(spec, "VI", coupled=True, influencer_id="synthetic-vi") + generate_corpus(
        spec, "HI", coupled=False, influencer_id="synthetic-hi"
    )


def demo_corpus() -> list[CommentRecord]:
    return generate_corpus_pair(demo_corpus_spec())
