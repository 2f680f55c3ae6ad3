"""Binary formal contexts and the Galois derivation operators.

Attribute and object sets are plain Python ints used as bit vectors: bit ``i``
set means index ``i`` is a member. Union, intersection and inclusion are then
single word-level operations, which is what concept enumeration and rule
counting spend their time on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import ContractViolation

AttrSet = int
ObjSet = int


def iter_bits(x: int) -> Iterator[int]:
    """Yield the indices of set bits in ascending order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_to_tuple(x: int) -> tuple[int, ...]:
    return tuple(iter_bits(x))


def bitset(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        if i < 0:
            raise ContractViolation(f"negative index {i}")
        out |= 1 << i
    return out


def full_mask(width: int) -> int:
    return (1 << width) - 1


@dataclass(frozen=True)
class AttributeId:
    index: int
    name: str


@dataclass(frozen=True)
class ObjectId:
    index: int
    label: str


@dataclass(frozen=True)
class FormalContext:
    """Immutable incidence relation between objects and attributes.

    ``rows[g]`` is the attribute bit vector of object ``g``. Column bit
    vectors over objects are derived once at construction.
    """

    object_labels: tuple[str, ...]
    attribute_names: tuple[str, ...]
    rows: tuple[int, ...]
    columns: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "object_labels", tuple(self.object_labels))
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        n_obj, n_attr = len(self.object_labels), len(self.attribute_names)
        if n_obj < 1 or n_attr < 1:
            raise ContractViolation("a context needs at least one object and one attribute")
        if len(self.rows) != n_obj:
            raise ContractViolation(f"{len(self.rows)} rows for {n_obj} objects")
        if len(set(self.object_labels)) != n_obj:
            raise ContractViolation("object labels must be unique")
        if len(set(self.attribute_names)) != n_attr:
            raise ContractViolation("attribute names must be unique")
        limit = 1 << n_attr
        for g, row in enumerate(self.rows):
            if row < 0 or row >= limit:
                raise ContractViolation(f"row {g} does not fit {n_attr} attributes")
        cols = [0] * n_attr
        for g, row in enumerate(self.rows):
            for m in iter_bits(row):
                cols[m] |= 1 << g
        object.__setattr__(self, "columns", tuple(cols))

    @classmethod
    def from_sets(
        cls,
        rows: Sequence[Iterable[str]],
        attributes: Sequence[str],
        objects: Sequence[str] | None = None,
    ) -> "FormalContext":
        """Build a context from per-object collections of attribute names."""
        index = {name: i for i, name in enumerate(attributes)}
        packed = []
        for r in rows:
            try:
                packed.append(bitset(index[a] for a in r))
            except KeyError as exc:
                raise ContractViolation(f"unknown attribute {exc.args[0]!r}") from None
        if objects is None:
            objects = [f"g{i + 1}" for i in range(len(rows))]
        return cls(tuple(objects), tuple(attributes), tuple(packed))

    @classmethod
    def from_matrix(
        cls,
        matrix: Sequence[Sequence[bool]],
        attributes: Sequence[str] | None = None,
        objects: Sequence[str] | None = None,
    ) -> "FormalContext":
        n_attr = len(matrix[0]) if len(matrix) else 0
        if attributes is None:
            attributes = [f"m{j}" for j in range(n_attr)]
        if objects is None:
            objects = [f"g{i}" for i in range(len(matrix))]
        packed = []
        for row in matrix:
            if len(row) != len(attributes):
                raise ContractViolation("ragged incidence matrix")
            packed.append(bitset(j for j, v in enumerate(row) if v))
        return cls(tuple(objects), tuple(attributes), tuple(packed))

    @property
    def n_objects(self) -> int:
        return len(self.object_labels)

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_names)

    @property
    def all_objects(self) -> ObjSet:
        return full_mask(self.n_objects)

    @property
    def all_attributes(self) -> AttrSet:
        return full_mask(self.n_attributes)

    @property
    def objects(self) -> list[ObjectId]:
        return [ObjectId(i, s) for i, s in enumerate(self.object_labels)]

    @property
    def attributes(self) -> list[AttributeId]:
        return [AttributeId(i, s) for i, s in enumerate(self.attribute_names)]

    def attribute(self, name: str) -> AttributeId:
        try:
            return AttributeId(self.attribute_names.index(name), name)
        except ValueError:
            raise KeyError(name) from None

    def attrs(self, *names: str) -> AttrSet:
        """Bit vector for the named attributes."""
        return bitset(self.attribute(n).index for n in names)

    def objs(self, *labels: str) -> ObjSet:
        idx = {s: i for i, s in enumerate(self.object_labels)}
        return bitset(idx[s] for s in labels)

    def attr_names(self, attrs: AttrSet) -> tuple[str, ...]:
        return tuple(self.attribute_names[i] for i in iter_bits(attrs))

    def obj_labels(self, objs: ObjSet) -> tuple[str, ...]:
        return tuple(self.object_labels[i] for i in iter_bits(objs))

    def column_count(self, attr: int) -> int:
        return self.columns[attr].bit_count()

    def check_attrs(self, attrs: AttrSet) -> None:
        if attrs < 0 or attrs >> self.n_attributes:
            raise ContractViolation(
                f"attribute set {attrs:#x} is wider than {self.n_attributes} attributes"
            )

    def check_objs(self, objs: ObjSet) -> None:
        if objs < 0 or objs >> self.n_objects:
            raise ContractViolation(f"object set {objs:#x} is wider than {self.n_objects} objects")

    def same_vocabulary(self, other: "FormalContext") -> bool:
        return self.attribute_names == other.attribute_names


def derive_attrs(ctx: FormalContext, objs: ObjSet) -> AttrSet:
    """Attributes shared by every object in ``objs`` (all attributes if empty)."""
    ctx.check_objs(objs)
    out = ctx.all_attributes
    for g in iter_bits(objs):
        out &= ctx.rows[g]
        if not out:
            break
    return out


def derive_objects(ctx: FormalContext, attrs: AttrSet) -> ObjSet:
    """Objects that have every attribute in ``attrs`` (all objects if empty)."""
    ctx.check_attrs(attrs)
    out = ctx.all_objects
    for m in iter_bits(attrs):
        out &= ctx.columns[m]
        if not out:
            break
    return out


def closure_attrs(ctx: FormalContext, attrs: AttrSet) -> AttrSet:
    return derive_attrs(ctx, derive_objects(ctx, attrs))


def closure_objects(ctx: FormalContext, objs: ObjSet) -> ObjSet:
    return derive_objects(ctx, derive_attrs(ctx, objs))


def is_concept(ctx: FormalContext, extent: ObjSet, intent: AttrSet) -> bool:
    ctx.check_objs(extent)
    ctx.check_attrs(intent)
    return derive_attrs(ctx, extent) == intent and derive_objects(ctx, intent) == extent
