"""Gelfand spaces of block algebras and the maps induced by morphisms.

An ultrafilter of the left-ideal lattice of ``(+) M_{n_x}`` is generated by a
minimal ideal, i.e. a line in one block, so the space is the disjoint union of
the projective spaces ``CP^{n_x - 1}``. Nothing infinite is enumerated: points
are concrete lines and closed sets are finite unions of projective subspaces.
"""
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix

from gelfkit import linalg
from gelfkit.error import DomainError, StructuralError
from gelfkit.finite_space import FiniteSpace, open_lattice, topology_generated_by
from gelfkit.linalg import ZERO, Subspace
from gelfkit.matrix_algebra import (
    AlgebraElement,
    BlockAlgebra,
    IdealLattice,
    LeftIdealRep,
    NotProper,
    commutant,
    ideal_join,
    ideal_leq,
    ideal_meet,
    minimal_ideals_sample,
    primitive_ideal,
)
from gelfkit.order import FilterRep, LatticeHom, is_ultrafilter
from gelfkit.utils import mask_of, setup_logging

logger = setup_logging(__name__)


@dataclass(frozen=True)
class UltrafilterPoint:
    """The principal ultrafilter generated by a line in one block."""

    algebra: BlockAlgebra
    block: int
    line: tuple[GaussianRational, ...]

    def __post_init__(self) -> None:
        self.algebra.check_block(self.block)
        if len(self.line) != self.algebra.block_dims[self.block]:
            raise StructuralError(f"line of length {len(self.line)} in block {self.block}")
        object.__setattr__(self, "line", linalg.normalize_line(self.line))

    @classmethod
    def of(cls, alg: BlockAlgebra, block: int, vector: Sequence) -> "UltrafilterPoint":
        return cls(alg, block, tuple(linalg.as_gauss(v) for v in vector))

    @classmethod
    def point(cls, alg: BlockAlgebra, index: int) -> "UltrafilterPoint":
        """Point of a commutative model."""
        if alg.block_dims[index] != 1:
            raise StructuralError(f"block {index} is not one-dimensional")
        return cls.of(alg, index, [1])

    def generator(self) -> LeftIdealRep:
        return LeftIdealRep.of_line(self.algebra, self.block, self.line)

    def contains(self, ideal: LeftIdealRep) -> bool:
        """Membership of ``ideal`` in the ultrafilter."""
        return ideal.spaces[self.block].contains(self.line)

    def to_json(self) -> dict:
        return {"block": self.block, "line": [linalg.format_gauss(v) for v in self.line]}


@dataclass(frozen=True)
class NoPreimagePoint:
    reason: str


@dataclass(frozen=True)
class ProjectiveClosed:
    """Finite union of projective linear subspaces, listed per block."""

    algebra: BlockAlgebra
    pieces: tuple[tuple[Subspace, ...], ...]

    @classmethod
    def empty(cls, alg: BlockAlgebra) -> "ProjectiveClosed":
        return cls(alg, tuple(() for _ in alg.block_dims))

    @classmethod
    def whole(cls, alg: BlockAlgebra) -> "ProjectiveClosed":
        return cls(alg, tuple((Subspace.full(n),) for n in alg.block_dims))

    @classmethod
    def of_ideal(cls, ideal: LeftIdealRep) -> "ProjectiveClosed":
        return cls(ideal.algebra, tuple(() if v.is_zero else (v,) for v in ideal.spaces))

    def contains(self, xi: UltrafilterPoint) -> bool:
        return any(v.contains(xi.line) for v in self.pieces[xi.block])

    def union(self, other: "ProjectiveClosed") -> "ProjectiveClosed":
        return ProjectiveClosed(self.algebra, tuple(_prune(a + b) for a, b in zip(self.pieces, other.pieces)))

    def intersection(self, other: "ProjectiveClosed") -> "ProjectiveClosed":
        pieces = []
        for mine, theirs in zip(self.pieces, other.pieces):
            meets = [a.meet(b) for a in mine for b in theirs]
            pieces.append(_prune(tuple(m for m in meets if not m.is_zero)))
        return ProjectiveClosed(self.algebra, tuple(pieces))

    @property
    def is_empty(self) -> bool:
        return all(not block for block in self.pieces)

    @property
    def is_everything(self) -> bool:
        return all(any(v.is_full for v in block) for block in self.pieces)

    def to_json(self) -> dict:
        return {
            "blocks": [
                [[[linalg.format_gauss(c) for c in row] for row in v.rows] for v in block] for block in self.pieces
            ]
        }


def _prune(pieces: tuple[Subspace, ...]) -> tuple[Subspace, ...]:
    """Drop subspaces contained in another piece."""
    kept: list[Subspace] = []
    for v in pieces:
        if v.is_zero or any(v.leq(w) for w in kept):
            continue
        kept = [w for w in kept if not w.leq(v)]
        kept.append(v)
    return tuple(kept)


@dataclass(frozen=True)
class BasicOpen:
    """{xi : some member of xi meets ``ideal`` trivially}."""

    ideal: LeftIdealRep
    complement: ProjectiveClosed
    degenerate: Optional[str] = None

    def contains(self, xi: UltrafilterPoint) -> bool:
        return not self.complement.contains(xi)

    def to_json(self) -> dict:
        out = {"complement": self.complement.to_json()}
        if self.degenerate:
            out["degenerate"] = self.degenerate
        return out


def basic_open(l: LeftIdealRep) -> BasicOpen:
    degenerate = None
    if l.is_zero:
        degenerate = "the zero ideal meets every ideal trivially, so the basic open is the whole space"
        logger.warning(degenerate)
    return BasicOpen(l, ProjectiveClosed.of_ideal(l), degenerate)


def basic_open_by_definition(xi: UltrafilterPoint, l: LeftIdealRep, members: Iterable[LeftIdealRep]) -> bool:
    """Search ``members`` for an ideal of ``xi`` meeting ``l`` trivially."""
    return any(xi.contains(m) and ideal_meet(m, l).is_zero for m in members)


@dataclass(frozen=True)
class GelfandSpaceDescr:
    algebra: BlockAlgebra

    @property
    def components(self) -> list[tuple[int, int]]:
        """(block, complex projective dimension) per block."""
        return [(x, n - 1) for x, n in enumerate(self.algebra.block_dims)]

    @property
    def is_finite(self) -> bool:
        return self.algebra.is_commutative

    def contains(self, xi: UltrafilterPoint) -> bool:
        if xi.algebra != self.algebra:
            return False
        return finite_point_witness(xi) is not None

    def points(self) -> list[UltrafilterPoint]:
        if not self.is_finite:
            raise DomainError("only commutative models have finitely many Gelfand points")
        return [UltrafilterPoint.point(self.algebra, x) for x in range(self.algebra.num_blocks)]

    def point_names(self) -> list[str]:
        return [f"p{x}" for x in range(self.algebra.num_blocks)]

    def finite_space(self) -> FiniteSpace:
        """Topology generated by the basic opens of every ideal (commutative models)."""
        pts = self.points()
        alg = self.algebra
        subbasis = []
        for mask in range(1 << alg.num_blocks):
            ideal = LeftIdealRep(
                alg, tuple(Subspace.full(1) if mask >> x & 1 else Subspace.zero(1) for x in range(alg.num_blocks))
            )
            complement = ProjectiveClosed.of_ideal(ideal)
            subbasis.append(mask_of(i for i, xi in enumerate(pts) if not complement.contains(xi)))
        return topology_generated_by(self.point_names(), subbasis)

    def describe(self) -> str:
        parts = [f"CP^{d}" for _, d in self.components]
        return " + ".join(parts)

    def to_json(self) -> dict:
        out: dict = {
            "components": [{"block": x, "projective_dim": d} for x, d in self.components],
            "description": self.describe(),
        }
        if self.is_finite:
            out["points"] = self.point_names()
            out["discrete"] = self.finite_space().is_discrete()
        return out


def gelfand_points(a: BlockAlgebra) -> GelfandSpaceDescr:
    return GelfandSpaceDescr(a)


def finite_point_witness(xi: UltrafilterPoint) -> Optional[AlgebraElement]:
    """Nonzero a with A a in xi: the rank-one projection onto the line."""
    proj = linalg.rank_one_projector(xi.line)
    a = xi.algebra.embed(xi.block, proj)
    ideal = LeftIdealRep(
        xi.algebra, tuple(linalg.column_space(b) for b in a.blocks)
    )
    if a.is_zero() or not xi.contains(ideal):
        return None
    return a


def principal_filter(lattice: IdealLattice, xi: UltrafilterPoint) -> FilterRep:
    """The members of ``xi`` inside a presented ideal lattice."""
    gen = lattice.index(xi.generator())
    members = lattice.lattice.up_set(gen)
    f = FilterRep(members)
    if not is_ultrafilter(lattice.lattice, f):
        raise StructuralError("principal filter of a line is not maximal in the lattice")
    return f


def belongs_to(xi: UltrafilterPoint, members: Optional[Iterable[LeftIdealRep]] = None) -> int:
    """The unique block on which every member of ``xi`` is nonzero."""
    ideals = [xi.generator(), LeftIdealRep.full(xi.algebra)]
    if members is not None:
        ideals.extend(m for m in members if xi.contains(m))
    candidates = set(range(xi.algebra.num_blocks))
    for ideal in ideals:
        candidates &= ideal.block_support()
    if len(candidates) != 1:
        raise StructuralError(f"ultrafilter belongs to blocks {sorted(candidates)}")
    (block,) = candidates
    if block != xi.block:
        raise StructuralError("ultrafilter belongs to a block other than its generator's")
    return block


def _dominates(first: Iterable[frozenset[int]], second: Iterable[frozenset[int]]) -> bool:
    second = list(second)
    return all(any(s <= f for s in second) for f in first)


def spectrally_equivalent(lattice: IdealLattice, f1: FilterRep, f2: FilterRep) -> bool:
    """Mutual domination of the block supports of the members."""
    y1 = [lattice.ideals[i].block_support() for i in f1.members]
    y2 = [lattice.ideals[i].block_support() for i in f2.members]
    return _dominates(y1, y2) and _dominates(y2, y1)


def points_spectrally_equivalent(xi1: UltrafilterPoint, xi2: UltrafilterPoint) -> bool:
    return xi1.generator().block_support() == xi2.generator().block_support()


def family_bicommutant(ideals: Iterable[LeftIdealRep], algebra: BlockAlgebra) -> Union[LeftIdealRep, NotProper]:
    """Closed span of the commutants of an arbitrary family of ideals."""
    result = LeftIdealRep.zero(algebra)
    for ideal in ideals:
        result = ideal_join(result, commutant(ideal))
    if result.is_full:
        return NotProper("the commutants span the whole algebra")
    return result


@dataclass(frozen=True)
class BicommutantDescr:
    algebra: BlockAlgebra

    def of(self, xi: UltrafilterPoint) -> LeftIdealRep:
        """xi'': the complement of the line in its block, everything elsewhere."""
        spaces = [Subspace.full(n) for n in self.algebra.block_dims]
        spaces[xi.block] = Subspace.line(xi.line).perp()
        return LeftIdealRep(self.algebra, tuple(spaces))

    def pair(self, xi: UltrafilterPoint) -> tuple[int, tuple[GaussianRational, ...]]:
        return xi.block, xi.line


def gelfand_bicommutant(a: BlockAlgebra) -> BicommutantDescr:
    return BicommutantDescr(a)


def bicommutant_is_injective(points: Sequence[UltrafilterPoint]) -> bool:
    if not points:
        return True
    descr = gelfand_bicommutant(points[0].algebra)
    images = {}
    for xi in points:
        image = descr.of(xi)
        other = images.get(image)
        if other is not None and other != xi:
            return False
        images[image] = xi
    return True


@dataclass(frozen=True)
class MorphismData:
    """A *-homomorphism given on matrix units: ``images[x][p][q] = phi(e_pq in block x)``."""

    source: BlockAlgebra
    target: BlockAlgebra
    images: tuple[tuple[tuple[AlgebraElement, ...], ...], ...] = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.images) != self.source.num_blocks:
            raise StructuralError("images are needed for every source block")
        for x, n in enumerate(self.source.block_dims):
            rows = self.images[x]
            if len(rows) != n or any(len(row) != n for row in rows):
                raise StructuralError(f"block {x} needs {n}x{n} matrix unit images")
            for row in rows:
                for img in row:
                    if img.algebra != self.target:
                        raise StructuralError("matrix unit image outside the target algebra")
        self._check_relations()

    def _check_relations(self) -> None:
        for x, n in enumerate(self.source.block_dims):
            if self.images[x][0][0].is_zero():
                raise StructuralError(f"morphism kills block {x}, it is not injective")
            for p in range(n):
                for q in range(n):
                    e = self.images[x][p][q]
                    if e.adjoint() != self.images[x][q][p]:
                        raise StructuralError(f"morphism does not preserve the adjoint of e{p}{q} in block {x}")
                    for y, m in enumerate(self.source.block_dims):
                        for r in range(m):
                            for s in range(m):
                                prod = e * self.images[y][r][s]
                                if x == y and q == r:
                                    expected = self.images[x][p][s]
                                    if prod != expected:
                                        raise StructuralError("morphism is not multiplicative on matrix units")
                                elif not prod.is_zero():
                                    raise StructuralError("morphism is not multiplicative on matrix units")

    @classmethod
    def from_multiplicities(
        cls, source: BlockAlgebra, target: BlockAlgebra, multiplicities: Sequence[Sequence[int]]
    ) -> "MorphismData":
        """Standard embedding; ``multiplicities[y][x]`` copies of block x sit in target block y."""
        if len(multiplicities) != target.num_blocks or any(len(row) != source.num_blocks for row in multiplicities):
            raise StructuralError("multiplicity matrix must be target blocks by source blocks")
        placements: list[list[tuple[int, int]]] = [[] for _ in source.block_dims]
        for y, row in enumerate(multiplicities):
            offset = 0
            for x, count in enumerate(row):
                if count < 0:
                    raise StructuralError("multiplicities are non negative")
                for _ in range(count):
                    placements[x].append((y, offset))
                    offset += source.block_dims[x]
            if offset > target.block_dims[y]:
                raise StructuralError(f"copies do not fit in target block {y}")
        images = []
        for x, n in enumerate(source.block_dims):
            rows = []
            for p in range(n):
                row = []
                for q in range(n):
                    img = target.zero()
                    for y, offset in placements[x]:
                        img = img + target.unit(y, offset + p, offset + q)
                    row.append(img)
                rows.append(tuple(row))
            images.append(tuple(rows))
        return cls(source, target, tuple(images))

    @classmethod
    def identity(cls, alg: BlockAlgebra) -> "MorphismData":
        k = alg.num_blocks
        return cls.from_multiplicities(alg, alg, [[1 if x == y else 0 for x in range(k)] for y in range(k)])

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.source:
            raise StructuralError("element of a different algebra")
        out = self.target.zero()
        for x, n in enumerate(self.source.block_dims):
            rows = linalg.entries(a.blocks[x])
            for p in range(n):
                for q in range(n):
                    if rows[p][q] != ZERO:
                        out = out + self.images[x][p][q].scale(rows[p][q])
        return out

    __call__ = apply

    def compose(self, after: "MorphismData") -> "MorphismData":
        """``after`` applied after ``self``."""
        if after.source != self.target:
            raise StructuralError("morphisms do not compose")
        images = tuple(
            tuple(tuple(after.apply(img) for img in row) for row in block) for block in self.images
        )
        return MorphismData(self.source, after.target, images)

    def is_unital(self) -> bool:
        return self.apply(self.source.one()) == self.target.one()

    def is_nondegenerate(self) -> bool:
        """Ã phi(A) spans Ã, i.e. phi(1) has full range in every target block."""
        unit = self.apply(self.source.one())
        return all(linalg.rank(b) == b.shape[0] for b in unit.blocks)


def induced_lattice_map(m: MorphismData, l: LeftIdealRep) -> LeftIdealRep:
    """Closed span of Ã phi(L): the range of phi(P_V) in every target block."""
    if l.algebra != m.source:
        raise StructuralError("ideal of a different algebra")
    image = m.apply(l.projection())
    return LeftIdealRep(m.target, tuple(linalg.column_space(b) for b in image.blocks))


def _apply_block(mat: DomainMatrix, vector: Sequence[GaussianRational]) -> list[GaussianRational]:
    rows = linalg.entries(mat)
    out = []
    for row in rows:
        total = ZERO
        for a, b in zip(row, vector):
            total += a * b
        out.append(total)
    return out


def _proportional(u: Sequence[GaussianRational], ref: Sequence[GaussianRational]) -> Optional[GaussianRational]:
    """c with u = c ref, or None."""
    pivot = next(i for i, v in enumerate(ref) if v != ZERO)
    c = u[pivot] / ref[pivot]
    if all(a == c * b for a, b in zip(u, ref)):
        return c
    return None


def induced_ultrafilter_map(
    m: MorphismData, xi_tilde: UltrafilterPoint
) -> Union[UltrafilterPoint, NoPreimagePoint]:
    """The source ultrafilter whose pushed-forward filter lies inside ``xi_tilde``."""
    if xi_tilde.algebra != m.target:
        raise StructuralError("point of a different algebra")
    y = xi_tilde.block
    line = list(xi_tilde.line)
    for x, n in enumerate(m.source.block_dims):
        unit = m.apply(m.source.block_unit(x)).blocks[y]
        if _apply_block(unit, line) != line:
            continue
        vectors = [_apply_block(m.images[x][0][p].blocks[y], line) for p in range(n)]
        ref = next((v for v in vectors if any(c != ZERO for c in v)), None)
        if ref is None:
            return NoPreimagePoint(f"line is fixed by the unit of block {x} but killed by its matrix units")
        coeffs = []
        for v in vectors:
            c = _proportional(v, ref)
            if c is None:
                return NoPreimagePoint(f"line is not a pure tensor over block {x}")
            coeffs.append(c)
        xi = UltrafilterPoint(m.source, x, tuple(coeffs))
        image = induced_lattice_map(m, xi.generator())
        if not xi_tilde.contains(image):
            return NoPreimagePoint(f"pushed filter of block {x} does not lie in the point")
        return xi
    return NoPreimagePoint("no source block unit fixes the line")


@dataclass
class GoodnessReport:
    total: bool = True
    open_preimages: bool = True
    bicommutant_compatible: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def good(self) -> bool:
        return self.total and self.open_preimages and self.bicommutant_compatible

    def to_json(self) -> dict:
        return {
            "good": self.good,
            "total": self.total,
            "open_preimages": self.open_preimages,
            "bicommutant_compatible": self.bicommutant_compatible,
            "failures": list(self.failures),
        }


def _test_ideals(alg: BlockAlgebra) -> list[LeftIdealRep]:
    ideals = [primitive_ideal(alg, x) for x in range(alg.num_blocks)]
    ideals += minimal_ideals_sample(alg, 4, seed=1)
    return ideals


def is_good(m: MorphismData, sample: Sequence[UltrafilterPoint]) -> GoodnessReport:
    """Totality, openness of pulled back basic opens and the bicommutant square, on a sample."""
    report = GoodnessReport()
    source_bicommutant = gelfand_bicommutant(m.source)
    target_bicommutant = gelfand_bicommutant(m.target)
    ideals = _test_ideals(m.source)
    for i, xi_tilde in enumerate(sample):
        xi = induced_ultrafilter_map(m, xi_tilde)
        if isinstance(xi, NoPreimagePoint):
            report.total = False
            report.failures.append(f"sample {i}: {xi.reason}")
            continue
        for j, ideal in enumerate(ideals):
            # preimage of the basic open of L is the basic open of the induced ideal
            pulled = basic_open(induced_lattice_map(m, ideal))
            if basic_open(ideal).contains(xi) != pulled.contains(xi_tilde):
                report.open_preimages = False
                report.failures.append(f"sample {i}: basic open of test ideal {j} does not pull back")
        pushed = induced_lattice_map(m, source_bicommutant.of(xi))
        if not ideal_leq(pushed, target_bicommutant.of(xi_tilde)):
            report.bicommutant_compatible = False
            report.failures.append(f"sample {i}: bicommutant square does not commute")
    logger.info("goodness on %s sampled points: %s", len(sample), report.good)
    return report


def ideal_lattice_of_commutative(n: int) -> tuple[IdealLattice, LatticeHom]:
    """All ideals of C(X), |X| = n, and the isomorphism onto the open sets of discrete X."""
    alg = BlockAlgebra.commutative(n)
    ideals = [
        LeftIdealRep(alg, tuple(Subspace.full(1) if mask >> x & 1 else Subspace.zero(1) for x in range(n)))
        for mask in range(1 << n)
    ]
    lattice = IdealLattice(alg, ideals)
    space = FiniteSpace.discrete([f"p{x}" for x in range(n)])
    opens = open_lattice(space)
    mapping = tuple(
        space.open_index(mask_of(x for x in range(n) if not ideal.spaces[x].is_zero)) for ideal in lattice.ideals
    )
    return lattice, LatticeHom(lattice.lattice, opens, mapping)


def sample_points(alg: BlockAlgebra, count: int, seed: int = 0) -> list[UltrafilterPoint]:
    points = []
    for ideal in minimal_ideals_sample(alg, count, seed):
        (x,) = ideal.block_support()
        points.append(UltrafilterPoint(alg, x, ideal.spaces[x].rows[0]))
    return points
