"""Hausdorff blowing-up of a block algebra over a finite discrete space.

Continuous functions on X act through the center: ``f`` becomes the element
that is ``f(point(x)) * 1`` on block ``x``. Everything below is exact; the
locally compact generality collapses to indicator functions.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from gelfkit import linalg
from gelfkit.abelian import AbHom, CyclicSum
from gelfkit.error import DomainError, StructuralError
from gelfkit.finite_space import FiniteSpace
from gelfkit.gelfand_space import UltrafilterPoint, belongs_to
from gelfkit.linalg import GaussianRational, Subspace
from gelfkit.matrix_algebra import (
    AlgebraElement,
    BlockAlgebra,
    HereditaryCorner,
    LeftIdealRep,
    NormEnclosure,
    hereditary_of_ideal,
    op_norm,
    rep,
    spectrum,
)
from gelfkit.sheaf import FinitePresheaf, germ
from gelfkit.utils import bits, mask_of, setup_logging

logger = setup_logging(__name__)


@dataclass(frozen=True)
class BlowingUp:
    algebra: BlockAlgebra
    space: FiniteSpace
    block_to_point: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.block_to_point) != self.algebra.num_blocks:
            raise StructuralError("every block needs a point of the base space")
        for p in self.block_to_point:
            if not isinstance(p, int) or p < 0 or p >= self.space.size:
                raise StructuralError(f"point index {p} out of range")
        if not self.space.is_discrete():
            raise DomainError("blowing-up needs a Hausdorff (discrete) finite base")
        if not self.density_holds():
            raise StructuralError("C(X) A is not dense in A")

    def blocks_over(self, mask: int) -> frozenset[int]:
        return frozenset(x for x, p in enumerate(self.block_to_point) if mask >> p & 1)

    def unreachable_points(self) -> list[int]:
        used = set(self.block_to_point)
        return [p for p in range(self.space.size) if p not in used]

    def embed(self, values: Sequence) -> AlgebraElement:
        """The central element of a function on X."""
        if len(values) != self.space.size:
            raise StructuralError("a function needs one value per point")
        blocks = []
        for x, n in enumerate(self.algebra.block_dims):
            value = linalg.as_gauss(values[self.block_to_point[x]])
            blocks.append(linalg.scale(linalg.identity(n), value))
        return self.algebra.element(blocks)

    def indicator(self, mask: int) -> AlgebraElement:
        return self.embed([1 if mask >> p & 1 else 0 for p in range(self.space.size)])

    def density_holds(self) -> bool:
        """Span of C(X) A equals A, checked by rank."""
        one = self.indicator(self.space.full)
        vectors = []
        for p in range(self.space.size):
            f = self.indicator(1 << p)
            for u in self.algebra.matrix_units():
                vectors.append([v for b in (f * u).blocks for row in linalg.entries(b) for v in row])
        span = DomainMatrix(vectors, (len(vectors), self.algebra.dimension), QQ_I).rank()
        return span == self.algebra.dimension and one == self.algebra.one()

    def is_central(self) -> bool:
        for p in range(self.space.size):
            f = self.indicator(1 << p)
            if any(f * u != u * f for u in self.algebra.matrix_units()):
                return False
        return True


@dataclass(frozen=True)
class USubalgebra:
    """``_U A``, ``A_U`` and ``_U A_U`` for an open set U."""

    open_set: int
    blocks: frozenset[int]
    left: LeftIdealRep
    right: LeftIdealRep
    corner: HereditaryCorner

    def contains_left(self, a: AlgebraElement) -> bool:
        return set(a.nonzero_blocks()) <= self.blocks

    def contains_right(self, a: AlgebraElement) -> bool:
        return set(a.nonzero_blocks()) <= self.blocks

    def contains_corner(self, a: AlgebraElement) -> bool:
        return self.corner.contains(a)

    def spanning_set(self) -> list[AlgebraElement]:
        alg = self.left.algebra
        return [alg.unit(x, p, q) for x in sorted(self.blocks) for p in range(alg.block_dims[x]) for q in range(alg.block_dims[x])]


def u_subalgebra(b: BlowingUp, u: int) -> USubalgebra:
    if not b.space.is_open(u):
        raise DomainError(f"{b.space.open_name(u)} is not open")
    blocks = b.blocks_over(u)
    spaces = tuple(
        Subspace.full(n) if x in blocks else Subspace.zero(n) for x, n in enumerate(b.algebra.block_dims)
    )
    # the block ideal is two-sided, so the same subspaces describe both sides
    ideal = LeftIdealRep(b.algebra, spaces)
    return USubalgebra(u, blocks, ideal, ideal, HereditaryCorner(b.algebra, spaces))


def vanishes_off(b: BlowingUp, u: int, a: AlgebraElement) -> bool:
    """f a = 0 for every f vanishing on U."""
    for p in bits(b.space.full & ~u):
        if not (b.indicator(1 << p) * a).is_zero():
            return False
    return True


def products_vanish(b: BlowingUp, u1: int, u2: int) -> bool:
    """A_{u1} times _{u2}A is zero."""
    first = u_subalgebra(b, u1).spanning_set()
    second = u_subalgebra(b, u2).spanning_set()
    return all((x * y).is_zero() for x in first for y in second)


def support(b: BlowingUp, a: AlgebraElement) -> int:
    """Closure of the smallest U with a in _U A_U, as a point mask."""
    mask = mask_of(b.block_to_point[x] for x in a.nonzero_blocks())
    return b.space.closure(mask)


@dataclass(frozen=True)
class CompactApproximation:
    f: AlgebraElement
    support: int
    differences: tuple[NormEnclosure, NormEnclosure, NormEnclosure]
    corner_element: AlgebraElement
    eps: object

    @property
    def holds(self) -> bool:
        return all(d.hi < self.eps for d in self.differences)

    def to_json(self) -> dict:
        return {
            "support": bits(self.support),
            "differences": [d.to_json() for d in self.differences],
            "holds": self.holds,
        }


def approx_compact(b: BlowingUp, a: AlgebraElement, eps, tol=None) -> CompactApproximation:
    """Compactly supported f with a f, f a and f a f all within eps of a."""
    eps = QQ.convert(eps)
    if eps <= 0:
        raise DomainError("approx_compact needs a positive epsilon")
    mask = support(b, a)
    f = b.indicator(mask)
    tol = eps / 2 if tol is None else min(QQ.convert(tol), eps / 2)
    diffs = (op_norm(a - a * f, tol), op_norm(a - f * a, tol), op_norm(a - f * a * f, tol))
    return CompactApproximation(f, mask, diffs, f * a * f, eps)


@dataclass
class FactorizationReport:
    commutes: bool = True
    checked: int = 0
    unreachable_points: list[int] = field(default_factory=list)
    mismatches: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "commutes": self.commutes,
            "checked": self.checked,
            "unreachable_points": list(self.unreachable_points),
            "mismatches": list(self.mismatches),
        }


def gelfand_to_base(b: BlowingUp, xi: UltrafilterPoint) -> int:
    """The point p whose indicator acts without killing the generator of xi."""
    gen = b.algebra.embed(xi.block, linalg.rank_one_projector(xi.line))
    hits = [p for p in range(b.space.size) if not (b.indicator(1 << p) * gen).is_zero()]
    if len(hits) != 1:
        raise StructuralError(f"point of the Gelfand space lies over {len(hits)} base points")
    return hits[0]


def blowup_factorization(b: BlowingUp, sample: Sequence[UltrafilterPoint]) -> FactorizationReport:
    report = FactorizationReport(unreachable_points=b.unreachable_points())
    for i, xi in enumerate(sample):
        direct = gelfand_to_base(b, xi)
        via_spectrum = b.block_to_point[belongs_to(xi)]
        report.checked += 1
        if direct != via_spectrum:
            report.commutes = False
            report.mismatches.append(f"sample {i}: {direct} != {via_spectrum}")
    logger.info("blow-up factorization on %s points commutes: %s", report.checked, report.commutes)
    return report


def _unit_coordinate(u: AlgebraElement, a: AlgebraElement) -> GaussianRational:
    """tr(u* a), the coordinate of ``a`` along the matrix unit ``u``."""
    product = u.adjoint() * a
    total = linalg.ZERO
    for x in range(a.algebra.num_blocks):
        total += linalg.trace(product.block(x))
    return total


def hausdorff_spectrum_separates(a1: AlgebraElement, a2: AlgebraElement) -> bool:
    """Elements agreeing under every block representation are equal."""
    diff = a1 - a2
    same_reps = all(linalg.equal(rep(x, a1), rep(x, a2)) for x in spectrum(a1.algebra))
    same_coordinates = all(_unit_coordinate(u, diff) == linalg.ZERO for u in a1.algebra.matrix_units())
    if same_reps != same_coordinates:
        raise StructuralError("block representations do not separate elements")
    return same_reps


def corner_support(b: BlowingUp, corner: HereditaryCorner) -> int:
    return mask_of(b.block_to_point[x] for x, v in enumerate(corner.spaces) if not v.is_zero)


def cut_corner(b: BlowingUp, corner: HereditaryCorner, mask: int) -> HereditaryCorner:
    """The corner multiplied by the central indicator of ``mask``."""
    over = b.blocks_over(mask)
    return HereditaryCorner(
        corner.algebra,
        tuple(v if x in over else Subspace.zero(v.dim) for x, v in enumerate(corner.spaces)),
    )


def corner_point(corner: HereditaryCorner) -> Optional[UltrafilterPoint]:
    """The point of a minimal commutative corner, None for any other corner."""
    nonzero = [x for x, v in enumerate(corner.spaces) if not v.is_zero]
    if len(nonzero) != 1 or corner.spaces[nonzero[0]].rank != 1:
        return None
    (x,) = nonzero
    return UltrafilterPoint(corner.algebra, x, corner.spaces[x].rows[0])


def corner_presheaf(b: BlowingUp, corners: Sequence[HereditaryCorner]) -> FinitePresheaf:
    """One Z/2 per listed commutative corner meeting the open; restrictions forget the others."""
    for corner in corners:
        if corner.algebra != b.algebra:
            raise StructuralError("corner of a different algebra")
        if not corner.is_commutative:
            raise StructuralError("corners of the presheaf must be commutative")
    supports = [corner_support(b, c) for c in corners]
    x = b.space
    over = {u: [i for i, s in enumerate(supports) if s & u] for u in x.opens}
    sections = {u: CyclicSum((2,) * len(over[u])) for u in x.opens}
    restrictions = {}
    for u in x.opens:
        for v in x.opens:
            if v & ~u:
                continue
            rows = [[1 if i == j else 0 for j in over[u]] for i in over[v]]
            restrictions[(u, v)] = AbHom.make(sections[u], sections[v], rows)
    return FinitePresheaf(x, sections, restrictions)


@dataclass
class EtaleBijection:
    """Germs of minimal commutative corners against sampled Gelfand points."""

    points: int
    germs: int = 0
    minimal: bool = True
    lies_over: bool = True
    injective: bool = True
    surjective: bool = True
    mismatches: list[str] = field(default_factory=list)

    @property
    def bijective(self) -> bool:
        return self.minimal and self.lies_over and self.injective and self.surjective

    def to_json(self) -> dict:
        return {
            "points": self.points,
            "germs": self.germs,
            "minimal": self.minimal,
            "lies_over": self.lies_over,
            "injective": self.injective,
            "surjective": self.surjective,
            "bijective": self.bijective,
            "mismatches": self.mismatches,
        }


def gelfand_etale_bijection(
    b: BlowingUp, sample: Sequence[UltrafilterPoint], corners: Optional[Sequence[HereditaryCorner]] = None
) -> EtaleBijection:
    """Compare the germs of the corner presheaf with the sampled points of the Gelfand space.

    Without explicit ``corners`` the presheaf is built from the corners
    L ∩ L* of the generating ideals of the sample.
    """
    if corners is None:
        corners = list(dict.fromkeys(hereditary_of_ideal(xi.generator()) for xi in sample))
    p = corner_presheaf(b, corners)
    top = b.space.full
    listed = [i for i, c in enumerate(corners) if corner_support(b, c)]
    report = EtaleBijection(len(sample))
    decoded: dict[UltrafilterPoint, tuple[int, tuple[int, ...]]] = {}
    for k, i in enumerate(listed):
        section = [1 if j == k else 0 for j in range(len(listed))]
        for y in bits(corner_support(b, corners[i])):
            key = (y, tuple(germ(p, top, section, y)))
            report.germs += 1
            xi = corner_point(cut_corner(b, corners[i], 1 << y))
            if xi is None:
                report.minimal = False
                report.mismatches.append(f"germ of corner {i} at {b.space.points[y]} is not a point")
                continue
            if gelfand_to_base(b, xi) != y:
                report.lies_over = False
                report.mismatches.append(f"germ of corner {i} at {b.space.points[y]} lies over another point")
            seen = decoded.get(xi)
            if seen is not None and seen != key:
                report.injective = False
                report.mismatches.append(f"two germs give the point {xi.to_json()}")
            decoded[xi] = key
    for xi in sample:
        if xi not in decoded:
            report.surjective = False
            report.mismatches.append(f"no germ gives the point {xi.to_json()}")
    logger.info("etale comparison on %s points and %s germs: %s", report.points, report.germs, report.bijective)
    return report
