"""Finite topological spaces, continuous maps and their open-set lattices.

Open sets are bitmasks over point indices. The family of opens is kept
deduplicated and sorted by mask value, so two equal topologies compare equal.
"""
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence

from gelfkit.error import ResourceError, StructuralError
from gelfkit.order import FilterRep, LatticeHom, SemiLattice
from gelfkit.utils import bits, mask_of, setup_logging

logger = setup_logging(__name__)

MAX_SUBSET_POINTS = 20


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]
    opens: tuple[int, ...]

    def __post_init__(self) -> None:
        full = (1 << len(self.points)) - 1
        family = set(self.opens)
        if len(family) != len(self.opens) or list(self.opens) != sorted(self.opens):
            raise StructuralError("opens must be deduplicated and sorted, use FiniteSpace.make")
        if 0 not in family or full not in family:
            raise StructuralError("a topology contains the empty set and the whole space")
        for u in self.opens:
            if u & ~full:
                raise StructuralError(f"open set {bits(u)} mentions an unknown point")
        for u in self.opens:
            for v in self.opens:
                if (u | v) not in family or (u & v) not in family:
                    raise StructuralError(f"opens {bits(u)} and {bits(v)} break closure under union or intersection")

    @classmethod
    def make(cls, points: Sequence[str], opens: Iterable[int]) -> "FiniteSpace":
        return cls(tuple(points), tuple(sorted(set(opens))))

    @classmethod
    def from_sets(cls, points: Sequence[str], opens: Iterable[Iterable[int]]) -> "FiniteSpace":
        n = len(points)
        masks = []
        for u in opens:
            u = list(u)
            for i in u:
                if not isinstance(i, int) or i < 0 or i >= n:
                    raise StructuralError(f"point index {i} out of range")
            masks.append(mask_of(u))
        return cls.make(points, masks)

    @classmethod
    def discrete(cls, points: Sequence[str]) -> "FiniteSpace":
        if len(points) > MAX_SUBSET_POINTS:
            raise ResourceError(f"discrete topology on {len(points)} points is too large")
        return cls.make(points, range(1 << len(points)))

    @classmethod
    def indiscrete(cls, points: Sequence[str]) -> "FiniteSpace":
        return cls.make(points, [0, (1 << len(points)) - 1])

    @classmethod
    def sierpinski(cls) -> "FiniteSpace":
        return cls.make(("o", "c"), [0, 0b01, 0b11])

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def is_open(self, mask: int) -> bool:
        return mask in self._open_set

    @cached_property
    def _open_set(self) -> frozenset[int]:
        return frozenset(self.opens)

    def open_index(self, mask: int) -> int:
        try:
            return self.opens.index(mask)
        except ValueError as err:
            raise StructuralError(f"{bits(mask)} is not open") from err

    def is_closed(self, mask: int) -> bool:
        return self.is_open(self.full & ~mask)

    def minimal_open(self, x: int) -> int:
        result = self.full
        for u in self.opens:
            if u >> x & 1:
                result &= u
        return result

    def interior(self, mask: int) -> int:
        result = 0
        for u in self.opens:
            if u & ~mask == 0:
                result |= u
        return result

    def closure(self, mask: int) -> int:
        return self.full & ~self.interior(self.full & ~mask)

    def point_index(self, name: str) -> int:
        try:
            return self.points.index(name)
        except ValueError as err:
            raise StructuralError(f"unknown point {name!r}") from err

    def open_name(self, mask: int) -> str:
        return "{" + ",".join(self.points[i] for i in bits(mask)) + "}"

    def is_discrete(self) -> bool:
        return all(self.is_open(1 << x) for x in range(self.size))

    def is_hausdorff(self) -> bool:
        for x, y in combinations(range(self.size), 2):
            if not any(
                u >> x & 1 and v >> y & 1 and u & v == 0 for u in self.opens for v in self.opens
            ):
                return False
        return True

    def to_json(self) -> dict:
        return {"points": list(self.points), "opens": [bits(u) for u in self.opens]}


def open_lattice(x: FiniteSpace) -> SemiLattice:
    index = {u: i for i, u in enumerate(x.opens)}
    return SemiLattice.from_meet(
        [x.open_name(u) for u in x.opens],
        lambda a, b: index[x.opens[a] & x.opens[b]],
        index[0],
    )


@dataclass(frozen=True)
class ContinuousMap:
    source: FiniteSpace
    target: FiniteSpace
    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.mapping) != self.source.size:
            raise StructuralError("map must be total on the source points")
        for y in self.mapping:
            if y < 0 or y >= self.target.size:
                raise StructuralError(f"target point {y} out of range")
        for v in self.target.opens:
            if not self.source.is_open(self.preimage(v)):
                raise StructuralError(f"preimage of {self.target.open_name(v)} is not open")

    @classmethod
    def identity(cls, x: FiniteSpace) -> "ContinuousMap":
        return cls(x, x, tuple(range(x.size)))

    @classmethod
    def to_point(cls, x: FiniteSpace) -> "ContinuousMap":
        return cls(x, FiniteSpace.make(("*",), [0, 1]), tuple(0 for _ in range(x.size)))

    def preimage(self, mask: int) -> int:
        return mask_of(p for p, y in enumerate(self.mapping) if mask >> y & 1)

    def image(self, mask: int) -> int:
        return mask_of(self.mapping[p] for p in bits(mask))

    def compose(self, after: "ContinuousMap") -> "ContinuousMap":
        if after.source != self.target:
            raise StructuralError("continuous maps do not compose")
        return ContinuousMap(self.source, after.target, tuple(after.mapping[y] for y in self.mapping))

    def preimage_hom(self) -> LatticeHom:
        """Open-set preimage as a semilattice map (contravariant)."""
        target_lat = open_lattice(self.target)
        source_lat = open_lattice(self.source)
        return LatticeHom(
            target_lat,
            source_lat,
            tuple(self.source.open_index(self.preimage(v)) for v in self.target.opens),
        )


def topology_generated_by(points: Sequence[str], subbasis: Iterable[int]) -> FiniteSpace:
    """Coarsest topology containing ``subbasis``: finite intersections, then unions."""
    full = (1 << len(points)) - 1
    basis = {full}
    frontier = set(subbasis) | {full}
    while frontier:
        basis |= frontier
        frontier = {u & v for u in basis for v in basis} - basis
    opens = {0}
    frontier = set(basis)
    while frontier:
        opens |= frontier
        frontier = {u | b for u in frontier for b in basis} - opens
    logger.debug("generated %s opens from a basis of %s sets", len(opens), len(basis))
    return FiniteSpace.make(points, opens)


def initial_topology(points: Sequence[str], maps: Sequence[tuple[Sequence[int], FiniteSpace]]) -> FiniteSpace:
    subbasis = []
    for mapping, target in maps:
        if len(mapping) != len(points):
            raise StructuralError("each map must be total on the point set")
        for v in target.opens:
            subbasis.append(mask_of(p for p, y in enumerate(mapping) if v >> y & 1))
    return topology_generated_by(points, subbasis)


def final_topology(points: Sequence[str], maps: Sequence[tuple[FiniteSpace, Sequence[int]]]) -> FiniteSpace:
    n = len(points)
    if n > MAX_SUBSET_POINTS:
        raise ResourceError(f"final topology enumerates subsets of {n} points", partial=None)
    for source, mapping in maps:
        if len(mapping) != source.size or any(y < 0 or y >= n for y in mapping):
            raise StructuralError("each map must send every source point into the point set")
    opens = []
    for u in range(1 << n):
        if all(
            source.is_open(mask_of(p for p, y in enumerate(mapping) if u >> y & 1)) for source, mapping in maps
        ):
            opens.append(u)
    return FiniteSpace.make(points, opens)


def ultrafilter_limits(x: FiniteSpace, f: FilterRep) -> int:
    """Mask of the points whose every open neighborhood lies in ``f``."""
    limits = 0
    for p in range(x.size):
        if all(i in f.members for i, u in enumerate(x.opens) if u >> p & 1):
            limits |= 1 << p
    return limits


def simplex_faces(maximal_simplices: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """All nonempty faces, vertices first, in the point order of `face_poset_space`."""
    faces: set[tuple[int, ...]] = set()
    for simplex in maximal_simplices:
        simplex = tuple(sorted(set(simplex)))
        if not simplex:
            raise StructuralError("empty simplex")
        for k in range(1, len(simplex) + 1):
            faces.update(combinations(simplex, k))
    return sorted(faces, key=lambda s: (len(s), s))


def face_poset_space(maximal_simplices: Sequence[Sequence[int]], vertex_names: Optional[Sequence[str]] = None) -> FiniteSpace:
    """Finite model of a simplicial complex: faces as points, opens the up-sets."""
    ordered = simplex_faces(maximal_simplices)
    label = (lambda v: vertex_names[v]) if vertex_names else (lambda v: f"v{v}")
    names = ["".join(label(v) for v in face) for face in ordered]
    stars = [mask_of(j for j, tau in enumerate(ordered) if set(sigma) <= set(tau)) for sigma in ordered]
    return topology_generated_by(names, stars)


def vertex_star_cover(maximal_simplices: Sequence[Sequence[int]], vertex_names: Optional[Sequence[str]] = None) -> tuple[FiniteSpace, list[int]]:
    """Face space of a complex with the open stars of its vertices."""
    x = face_poset_space(maximal_simplices, vertex_names)
    vertices = [i for i, face in enumerate(simplex_faces(maximal_simplices)) if len(face) == 1]
    return x, star_cover(x, vertices)


def star_cover(x: FiniteSpace, vertices: Optional[Iterable[int]] = None) -> list[int]:
    """Minimal opens of the given points, all points by default."""
    chosen = list(range(x.size)) if vertices is None else list(vertices)
    return [x.minimal_open(v) for v in chosen]
