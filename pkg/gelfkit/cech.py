"""Nerves of covers and Čech cohomology with integer-matrix cochain complexes.

Simplices are strictly increasing tuples of cover indices. The differential
is the alternating sum over deleted vertices; the same global order is used
for pullbacks so that signs are deterministic.
"""
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional, Protocol, Sequence, Union

from gelfkit.abelian import (
    AbelianGroup,
    AbHom,
    CyclicSum,
    FgAbGroup,
    Subquotient,
    direct_sum,
    homology,
    subquotient_map,
    tensor,
    tor,
    zero_matrix,
)
from gelfkit.error import ResourceError, StructuralError
from gelfkit.finite_space import ContinuousMap, FiniteSpace
from gelfkit.linalg import Subspace
from gelfkit.sheaf import FinitePresheaf
from gelfkit.utils import env_int, setup_logging

logger = setup_logging(__name__)

DEFAULT_CAP_DIM = 12

Simplex = tuple[int, ...]


def default_cap_dim() -> int:
    return env_int("GELFKIT_CAP_DIM", DEFAULT_CAP_DIM)


class Cover(Protocol):
    @property
    def size(self) -> int:
        ...

    def label(self, i: int) -> str:
        ...

    def nonempty(self, simplex: Simplex) -> bool:
        ...


@dataclass(frozen=True)
class FiniteCover:
    """Open sets of a finite space whose union is ``covers`` (the whole space by default)."""

    space: FiniteSpace
    members: tuple[int, ...]
    covers: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.members:
            raise StructuralError("a cover needs at least one member")
        union = 0
        for u in self.members:
            if not self.space.is_open(u):
                raise StructuralError(f"cover member {self.space.open_name(u)} is not open")
            union |= u
        target = self.space.full if self.covers is None else self.covers
        if union != target:
            raise StructuralError(f"cover members leave {self.space.open_name(target & ~union)} uncovered")

    @property
    def size(self) -> int:
        return len(self.members)

    def label(self, i: int) -> str:
        return self.space.open_name(self.members[i])

    def intersection(self, simplex: Simplex) -> int:
        mask = self.space.full
        for i in simplex:
            mask &= self.members[i]
        return mask

    def nonempty(self, simplex: Simplex) -> bool:
        return self.intersection(simplex) != 0


@dataclass(frozen=True)
class AbstractCover:
    """Intersection pattern given by the maximal nonempty index families."""

    labels: tuple[str, ...]
    maximal_faces: tuple[frozenset[int], ...]

    @classmethod
    def make(cls, size: int, maximal_faces: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None) -> "AbstractCover":
        faces = []
        for face in maximal_faces:
            for i in face:
                if not isinstance(i, int) or i < 0 or i >= size:
                    raise StructuralError(f"cover index {i} out of range")
            faces.append(frozenset(face))
        covered = set().union(*faces) if faces else set()
        if covered != set(range(size)):
            raise StructuralError("every cover member must be nonempty")
        names = tuple(labels) if labels else tuple(f"U{i}" for i in range(size))
        return cls(names, tuple(faces))

    @property
    def size(self) -> int:
        return len(self.labels)

    def label(self, i: int) -> str:
        return self.labels[i]

    def nonempty(self, simplex: Simplex) -> bool:
        s = set(simplex)
        return any(s <= face for face in self.maximal_faces)


@dataclass(frozen=True)
class ProjectiveCover:
    """Members ``CP^n`` minus finite unions of projective subspaces ``P(L)``."""

    n: int
    removed: tuple[tuple[Subspace, ...], ...]

    def __post_init__(self) -> None:
        for j, pieces in enumerate(self.removed):
            for piece in pieces:
                if piece.dim != self.n + 1:
                    raise StructuralError(f"member {j} removes a subspace of the wrong ambient dimension")

    @property
    def size(self) -> int:
        return len(self.removed)

    def label(self, i: int) -> str:
        return f"V{i}"

    def nonempty(self, simplex: Simplex) -> bool:
        # a finite union of proper subspaces never exhausts a space over an infinite field
        return all(not piece.is_full for i in simplex for piece in self.removed[i])

    def covers_space(self) -> bool:
        """Whether the removed subspaces have no common point."""
        for choice in product(*self.removed):
            meet = Subspace.full(self.n + 1)
            for piece in choice:
                meet = meet.meet(piece)
            if not meet.is_zero:
                return False
        return True


def projective_cover(n: int, subspaces: Optional[Sequence[Subspace]] = None) -> ProjectiveCover:
    """Complements of the given subspaces, coordinate hyperplanes by default."""
    if subspaces is None:
        subspaces = []
        for j in range(n + 1):
            vectors = [[1 if k == i else 0 for k in range(n + 1)] for i in range(n + 1) if i != j]
            subspaces.append(Subspace.span(n + 1, vectors))
    return ProjectiveCover(n, tuple((s,) for s in subspaces))


@dataclass(frozen=True)
class ProductCover:
    base: Cover
    fiber: Cover

    @property
    def size(self) -> int:
        return self.base.size * self.fiber.size

    def split(self, i: int) -> tuple[int, int]:
        return divmod(i, self.fiber.size)

    def label(self, i: int) -> str:
        a, b = self.split(i)
        return f"{self.base.label(a)}x{self.fiber.label(b)}"

    def nonempty(self, simplex: Simplex) -> bool:
        parts = [self.split(i) for i in simplex]
        first = tuple(sorted({a for a, _ in parts}))
        second = tuple(sorted({b for _, b in parts}))
        return self.base.nonempty(first) and self.fiber.nonempty(second)


@dataclass(frozen=True)
class Nerve:
    simplices: tuple[tuple[Simplex, ...], ...]
    truncated: bool = False

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k < len(self.simplices) else 0

    def index(self, k: int) -> dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.simplices[k])} if 0 <= k < len(self.simplices) else {}

    def all_simplices(self) -> list[Simplex]:
        return [s for level in self.simplices for s in level]

    def is_full_simplex(self, size: int) -> bool:
        return self.count(size - 1) == 1

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "counts": [len(level) for level in self.simplices]}


def nerve(c: Cover, cap_dim: Optional[int] = None) -> Nerve:
    """All index families with nonempty intersection, level by level."""
    cap = default_cap_dim() if cap_dim is None else cap_dim
    level = [(i,) for i in range(c.size) if c.nonempty((i,))]
    levels = []
    while level:
        if len(levels) > cap:
            partial = Nerve(tuple(tuple(lv) for lv in levels), truncated=True)
            raise ResourceError(f"nerve has simplices above dimension {cap}", partial=partial)
        levels.append(level)
        nxt = []
        members = set(level)
        for s in level:
            for v in range(s[-1] + 1, c.size):
                t = s + (v,)
                # every face must already be present
                if all(t[:k] + t[k + 1 :] in members for k in range(len(t))) and c.nonempty(t):
                    nxt.append(t)
        level = nxt
    logger.debug("nerve simplex counts %s", [len(lv) for lv in levels])
    return Nerve(tuple(tuple(lv) for lv in levels))


@dataclass(frozen=True, eq=False)
class CochainComplex:
    groups: tuple[AbelianGroup, ...]
    differentials: tuple[AbHom, ...] = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.differentials) != max(len(self.groups) - 1, 0):
            raise StructuralError("a cochain complex needs one differential between consecutive groups")
        for d1, d2 in zip(self.differentials, self.differentials[1:]):
            square = d1.compose(d2)
            if not square.same_map(AbHom.zero(d1.source, d2.target)):
                raise StructuralError("differentials do not square to zero")

    def subquotients(self) -> list[Subquotient]:
        out = []
        for p, group in enumerate(self.groups):
            incoming = self.differentials[p - 1] if p > 0 else None
            outgoing = self.differentials[p] if p < len(self.differentials) else None
            out.append(homology(incoming, outgoing, group))
        return out

    def cohomology(self) -> list[FgAbGroup]:
        return [sq.group for sq in self.subquotients()]


def _sign_coefficient(sign: int, hom: AbHom) -> list[list[int]]:
    return [[sign * v for v in row] for row in hom.rows()]


def _constant_complex(nv: Nerve, group: AbelianGroup) -> CochainComplex:
    d = group.dim
    groups = tuple(CyclicSum(group.orders * nv.count(p)) for p in range(nv.dimension + 1))
    differentials = []
    for p in range(nv.dimension):
        rows = zero_matrix(groups[p + 1].dim, groups[p].dim)
        source_index = nv.index(p)
        for t, tau in enumerate(nv.simplices[p + 1]):
            for k in range(len(tau)):
                face = tau[:k] + tau[k + 1 :]
                s = source_index[face]
                for r in range(d):
                    rows[t * d + r][s * d + r] += (-1) ** k
        differentials.append(AbHom.make(groups[p], groups[p + 1], rows))
    return CochainComplex(groups, tuple(differentials))


def _presheaf_complex(nv: Nerve, cover: FiniteCover, p_sheaf: FinitePresheaf) -> CochainComplex:
    if p_sheaf.base != cover.space:
        raise StructuralError("presheaf and cover live on different spaces")
    opens = [[cover.intersection(s) for s in level] for level in nv.simplices]
    groups = []
    offsets = []
    for level in opens:
        offs, total = [], 0
        for u in level:
            offs.append(total)
            total += p_sheaf.group(u).dim
        offsets.append(offs)
        groups.append(CyclicSum.direct_sum(p_sheaf.group(u) for u in level))
    differentials = []
    for p in range(nv.dimension):
        source_index = nv.index(p)
        rows = zero_matrix(groups[p + 1].dim, groups[p].dim)
        for t, tau in enumerate(nv.simplices[p + 1]):
            target_open = opens[p + 1][t]
            for k in range(len(tau)):
                s = source_index[tau[:k] + tau[k + 1 :]]
                block = _sign_coefficient((-1) ** k, p_sheaf.rho(opens[p][s], target_open))
                for r, row in enumerate(block):
                    for c, value in enumerate(row):
                        rows[offsets[p + 1][t] + r][offsets[p][s] + c] += value
        differentials.append(AbHom.make(groups[p], groups[p + 1], rows))
    return CochainComplex(tuple(groups), tuple(differentials))


Coefficients = Union[AbelianGroup, FinitePresheaf]


def cech_complex(c: Cover, coeff: Coefficients, cap_dim: Optional[int] = None) -> CochainComplex:
    nv = nerve(c, cap_dim)
    if isinstance(coeff, FinitePresheaf):
        if not isinstance(c, FiniteCover):
            raise StructuralError("presheaf coefficients need a cover of a finite space")
        return _presheaf_complex(nv, c, coeff)
    return _constant_complex(nv, coeff)


def cech_cohomology(c: Cover, coeff: Coefficients = FgAbGroup.free(1), cap_dim: Optional[int] = None) -> list[FgAbGroup]:
    """H^p for p = 0..dim(nerve)."""
    groups = cech_complex(c, coeff, cap_dim).cohomology()
    logger.info("cech cohomology over %s members: %s", c.size, [str(g) for g in groups])
    return groups


def _refinement_image(tau: Sequence[int], simplex: Simplex) -> Optional[tuple[int, Simplex]]:
    """(sign, sorted image) of a simplex, or None when two vertices collide."""
    image = [tau[i] for i in simplex]
    if len(set(image)) != len(image):
        return None
    sign = 1
    for a in range(len(image)):
        for b in range(a + 1, len(image)):
            if image[a] > image[b]:
                sign = -sign
    return sign, tuple(sorted(image))


def _check_refinement(source: Cover, target: Cover, tau: Sequence[int], f: Optional[ContinuousMap]) -> None:
    if len(tau) != source.size or any(j < 0 or j >= target.size for j in tau):
        raise StructuralError("refinement must send every source member to a target member")
    if isinstance(source, FiniteCover) and isinstance(target, FiniteCover):
        for i, j in enumerate(tau):
            if f is None:
                if source.space != target.space:
                    raise StructuralError("covers of different spaces need a map")
                image = source.members[i]
            else:
                image = f.image(source.members[i])
            if image & ~target.members[j]:
                raise StructuralError(f"member {source.label(i)} is not carried into {target.label(j)}")


def pullback_hom(
    source: Cover,
    target: Cover,
    tau: Sequence[int],
    coeff: AbelianGroup = FgAbGroup.free(1),
    f: Optional[ContinuousMap] = None,
    cap_dim: Optional[int] = None,
) -> list[AbHom]:
    """H^q(target) -> H^q(source) induced by the refinement ``tau``."""
    _check_refinement(source, target, tau, f)
    src_nerve, tgt_nerve = nerve(source, cap_dim), nerve(target, cap_dim)
    src_complex = _constant_complex(src_nerve, coeff)
    tgt_complex = _constant_complex(tgt_nerve, coeff)
    src_h, tgt_h = src_complex.subquotients(), tgt_complex.subquotients()
    d = coeff.dim
    maps = []
    for q in range(len(src_h)):
        if q < len(tgt_h):
            rows = zero_matrix(src_complex.groups[q].dim, tgt_complex.groups[q].dim)
            index = tgt_nerve.index(q)
            for s, sigma in enumerate(src_nerve.simplices[q]):
                image = _refinement_image(tau, sigma)
                if image is None:
                    continue
                sign, tau_sigma = image
                if tau_sigma not in index:
                    raise StructuralError(f"refinement sends simplex {sigma} outside the target nerve")
                t = index[tau_sigma]
                for r in range(d):
                    rows[s * d + r][t * d + r] += sign
            chain = AbHom.make(tgt_complex.groups[q], src_complex.groups[q], rows)
            maps.append(subquotient_map(chain, tgt_h[q], src_h[q]))
        else:
            # the target nerve stops below degree q
            maps.append(AbHom.zero(FgAbGroup.trivial(), src_h[q].group))
    return maps


def product_cover_cohomology(base: Cover, fiber: Cover, cap_dim: Optional[int] = None) -> list[FgAbGroup]:
    """Constant integer coefficients on the cover by products of members."""
    return cech_cohomology(ProductCover(base, fiber), FgAbGroup.free(1), cap_dim)


def kunneth_cohomology(h_base: Sequence[FgAbGroup], h_fiber: Sequence[FgAbGroup]) -> list[FgAbGroup]:
    """Tensor terms in degree p+q and Tor terms from degree p+q-1."""
    top = len(h_base) + len(h_fiber) - 1
    out = []
    for n in range(top):
        parts = []
        for p, a in enumerate(h_base):
            for q, b in enumerate(h_fiber):
                if p + q == n:
                    parts.append(tensor(a, b))
                if p + q == n + 1:
                    parts.append(tor(a, b))
        out.append(direct_sum(parts))
    while len(out) > 1 and out[-1].is_trivial:
        out.pop()
    return out


def cellular_cohomology(complex_) -> list[FgAbGroup]:
    """Cohomology of anything exposing ``cellular_cochain_complex()``."""
    return complex_.cellular_cochain_complex().cohomology()


def sphere_cover() -> AbstractCover:
    """Four members whose nerve is the boundary of a tetrahedron."""
    return AbstractCover.make(4, [s for s in combinations(range(4), 3)])


def projective_space_cohomology(n: int) -> list[FgAbGroup]:
    """Z in even degrees up to 2n, from the cell structure with zero differentials."""
    groups = []
    for p in range(2 * n + 1):
        groups.append(FgAbGroup.free(1) if p % 2 == 0 else FgAbGroup.trivial())
    complex_ = CochainComplex(
        tuple(groups), tuple(AbHom.zero(groups[p], groups[p + 1]) for p in range(2 * n))
    )
    return complex_.cohomology()


@dataclass(frozen=True)
class ProjectiveComparison:
    n: int
    nerve: Nerve
    gelfand_side: tuple[FgAbGroup, ...]
    hausdorff_side: tuple[FgAbGroup, ...]

    @property
    def agree(self) -> bool:
        return _trimmed(self.gelfand_side) == _trimmed(self.hausdorff_side)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "nerve": self.nerve.to_json(),
            "full_simplex": self.nerve.is_full_simplex(self.n + 1),
            "gelfand_cover": [g.to_json() for g in self.gelfand_side],
            "hausdorff": [g.to_json() for g in self.hausdorff_side],
            "agree": self.agree,
        }


def _trimmed(groups: Sequence[FgAbGroup]) -> tuple[FgAbGroup, ...]:
    out = list(groups)
    while len(out) > 1 and out[-1].is_trivial:
        out.pop()
    return tuple(out)


def projective_comparison(n: int, cap_dim: Optional[int] = None) -> ProjectiveComparison:
    """Čech cohomology of the hyperplane-complement cover against H^*(CP^n)."""
    if n < 0:
        raise StructuralError("projective dimension must be non negative")
    cover = projective_cover(n)
    nv = nerve(cover, cap_dim)
    left = tuple(_constant_complex(nv, FgAbGroup.free(1)).cohomology())
    right = tuple(projective_space_cohomology(n))
    report = ProjectiveComparison(n, nv, left, right)
    if not report.agree:
        logger.warning("projective cover cohomology %s differs from CP^%s cohomology %s",
                       [str(g) for g in left], n, [str(g) for g in right])
    return report
