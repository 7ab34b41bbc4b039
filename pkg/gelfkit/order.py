"""Finite meet-semilattices, filters and ultrafilters.

Orientation: ``leq(a, b)`` means ``b`` is larger; for open sets larger means
superset. A filter is nonempty, closed under meets and under passing to larger
elements, and never contains the designated ``zero``.
"""
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from gelfkit.error import ResourceError, StructuralError
from gelfkit.utils import setup_logging

logger = setup_logging(__name__)

DEFAULT_EXPLORATION_BOUND = 2**20


@dataclass(frozen=True)
class Degenerate:
    """No filter contains the given generators."""

    reason: str


@dataclass(frozen=True)
class FilterRep:
    members: frozenset[int]

    @classmethod
    def of(cls, members: Iterable[int]) -> "FilterRep":
        return cls(frozenset(members))

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def to_json(self) -> dict:
        return {"members": self.sorted_members()}


FilterResult = Union[FilterRep, Degenerate]


@dataclass(frozen=True)
class SemiLattice:
    names: tuple[str, ...]
    leq_table: tuple[tuple[bool, ...], ...] = field(repr=False)
    meet_table: tuple[tuple[int, ...], ...] = field(repr=False)
    zero: int

    @classmethod
    def from_order(cls, names: Sequence[str], pairs: Iterable[tuple[int, int]], zero: int) -> "SemiLattice":
        n = len(names)
        if n == 0:
            raise StructuralError("a semilattice needs at least one element")
        _check_index(zero, n)
        rel = [[i == j for j in range(n)] for i in range(n)]
        for a, b in pairs:
            _check_index(a, n)
            _check_index(b, n)
            rel[a][b] = True
        for k in range(n):
            for i in range(n):
                if rel[i][k]:
                    row_k = rel[k]
                    row_i = rel[i]
                    for j in range(n):
                        if row_k[j]:
                            row_i[j] = True
        for i in range(n):
            for j in range(i + 1, n):
                if rel[i][j] and rel[j][i]:
                    raise StructuralError(f"order is not antisymmetric: {names[i]} and {names[j]}")
        meets = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                lower = [c for c in range(n) if rel[c][a] and rel[c][b]]
                glb = [c for c in lower if all(rel[d][c] for d in lower)]
                if len(glb) != 1:
                    raise StructuralError(f"{names[a]} and {names[b]} have no greatest lower bound")
                meets[a][b] = meets[b][a] = glb[0]
        return cls(tuple(names), tuple(tuple(row) for row in rel), tuple(tuple(row) for row in meets), zero)

    @classmethod
    def from_meet(cls, names: Sequence[str], meet: Callable[[int, int], int], zero: int) -> "SemiLattice":
        n = len(names)
        if n == 0:
            raise StructuralError("a semilattice needs at least one element")
        _check_index(zero, n)
        table = [[meet(a, b) for b in range(n)] for a in range(n)]
        for a in range(n):
            if table[a][a] != a:
                raise StructuralError(f"meet is not idempotent at {names[a]}")
            for b in range(n):
                _check_index(table[a][b], n)
                if table[a][b] != table[b][a]:
                    raise StructuralError(f"meet is not commutative at {names[a]}, {names[b]}")
        for a in range(n):
            for b in range(n):
                ab = table[a][b]
                for c in range(n):
                    if table[ab][c] != table[a][table[b][c]]:
                        raise StructuralError("meet is not associative")
        rel = tuple(tuple(table[a][b] == a for b in range(n)) for a in range(n))
        return cls(tuple(names), rel, tuple(tuple(row) for row in table), zero)

    @property
    def size(self) -> int:
        return len(self.names)

    def leq(self, a: int, b: int) -> bool:
        return self.leq_table[a][b]

    def meet(self, a: int, b: int) -> int:
        return self.meet_table[a][b]

    def meet_all(self, items: Iterable[int]) -> int:
        items = list(items)
        if not items:
            raise StructuralError("meet of an empty family is the zero convention, not an element")
        acc = items[0]
        for item in items[1:]:
            acc = self.meet(acc, item)
        return acc

    def up_set(self, a: int) -> frozenset[int]:
        row = self.leq_table[a]
        return frozenset(b for b in range(self.size) if row[b])

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as err:
            raise StructuralError(f"unknown element {name!r}") from err

    def top(self) -> Optional[int]:
        for a in range(self.size):
            if all(self.leq(b, a) for b in range(self.size)):
                return a
        return None

    def to_json(self) -> dict:
        pairs = [[a, b] for a in range(self.size) for b in range(self.size) if a != b and self.leq(a, b)]
        return {"elements": list(self.names), "leq": pairs, "zero": self.zero}


def _check_index(a: int, n: int) -> None:
    if not isinstance(a, int) or a < 0 or a >= n:
        raise StructuralError(f"element index {a} out of range 0..{n - 1}")


def _check_members(lat: SemiLattice, s: Iterable[int]) -> list[int]:
    items = list(s)
    for a in items:
        _check_index(a, lat.size)
    return items


def is_filter(lat: SemiLattice, s: Union[FilterRep, Iterable[int]]) -> bool:
    members = set(_check_members(lat, s.members if isinstance(s, FilterRep) else s))
    if not members or lat.zero in members:
        return False
    for a in members:
        for b in members:
            if lat.meet(a, b) not in members:
                return False
        if not lat.up_set(a) <= members:
            return False
    return True


def generate_filter(lat: SemiLattice, gens: Iterable[int]) -> FilterResult:
    items = _check_members(lat, gens)
    if not items:
        raise StructuralError("generate_filter needs at least one generator")
    bottom = lat.meet_all(items)
    if lat.leq(bottom, lat.zero):
        logger.debug("generators %s meet below zero", items)
        return Degenerate(f"meet of {sorted(set(items))} lies below the zero element")
    return FilterRep(lat.up_set(bottom))


def _candidates(lat: SemiLattice) -> list[int]:
    return [m for m in range(lat.size) if not lat.leq(m, lat.zero)]


def _ultra_generators(lat: SemiLattice, bound: int) -> list[int]:
    candidates = _candidates(lat)
    found: list[int] = []
    explored = 0
    for m in candidates:
        explored += 1
        if explored > bound:
            raise ResourceError(
                f"ultrafilter search explored more than {bound} filters",
                partial=[FilterRep(lat.up_set(g)) for g in found],
            )
        if not any(c != m and lat.leq(c, m) for c in candidates):
            found.append(m)
    return found


def enumerate_ultrafilters(lat: SemiLattice, bound: int = DEFAULT_EXPLORATION_BOUND) -> list[FilterRep]:
    """All maximal filters, ordered by the index of their generator."""
    gens = _ultra_generators(lat, bound)
    logger.debug("%s ultrafilters in a lattice of %s elements", len(gens), lat.size)
    return [FilterRep(lat.up_set(g)) for g in gens]


def is_ultrafilter(lat: SemiLattice, f: FilterRep) -> bool:
    if not is_filter(lat, f):
        return False
    generator = lat.meet_all(f.members)
    return not any(
        c != generator and lat.leq(c, generator) and not lat.leq(c, lat.zero) for c in range(lat.size)
    )


def extend_to_ultrafilter(lat: SemiLattice, f: FilterRep) -> FilterRep:
    if not is_filter(lat, f):
        raise StructuralError("extend_to_ultrafilter expects a filter")
    generator = lat.meet_all(f.members)
    for g in _ultra_generators(lat, DEFAULT_EXPLORATION_BOUND):
        if lat.leq(g, generator):
            return FilterRep(lat.up_set(g))
    raise StructuralError("no ultrafilter above the filter")


def is_principal(lat: SemiLattice, f: FilterRep) -> Optional[int]:
    members = _check_members(lat, f.members)
    if not members:
        return None
    generator = lat.meet_all(members)
    if generator in f.members and lat.up_set(generator) == f.members:
        return generator
    return None


@dataclass(frozen=True)
class LatticeHom:
    source: SemiLattice
    target: SemiLattice
    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.mapping) != self.source.size:
            raise StructuralError("lattice map must be total on the source")
        for b in self.mapping:
            _check_index(b, self.target.size)
        for a in range(self.source.size):
            for b in range(self.source.size):
                if self.mapping[self.source.meet(a, b)] != self.target.meet(self.mapping[a], self.mapping[b]):
                    raise StructuralError(
                        f"map does not preserve the meet of {self.source.names[a]} and {self.source.names[b]}"
                    )

    @classmethod
    def identity(cls, lat: SemiLattice) -> "LatticeHom":
        return cls(lat, lat, tuple(range(lat.size)))

    def __call__(self, a: int) -> int:
        return self.mapping[a]

    def compose(self, after: "LatticeHom") -> "LatticeHom":
        """``after`` applied to the result of ``self``."""
        if after.source != self.target:
            raise StructuralError("lattice maps do not compose")
        return LatticeHom(self.source, after.target, tuple(after.mapping[b] for b in self.mapping))


def pushforward_filter(h: LatticeHom, f: FilterRep) -> FilterResult:
    if not is_filter(h.source, f):
        raise StructuralError("pushforward_filter expects a filter of the source lattice")
    return generate_filter(h.target, [h(a) for a in f.sorted_members()])
