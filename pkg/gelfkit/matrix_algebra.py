"""Finite-dimensional C*-algebra models: direct sums of full matrix blocks.

A closed left ideal of ``M_{n_1} + ... + M_{n_k}`` is ``A * P_V`` for one
subspace ``V_i`` per block; ``LeftIdealRep`` stores exactly those subspaces.
Every lattice decision is exact over the Gaussian rationals. Norms are the only
approximate quantities and come back as rational enclosures.
"""
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence, Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyfuncs import interpolate
from sympy import Poly

from gelfkit import linalg
from gelfkit.error import DomainError, ModeError, StructuralError
from gelfkit.linalg import ONE, ZERO, Subspace
from gelfkit.order import FilterRep, SemiLattice, is_filter
from gelfkit.utils import setup_logging

logger = setup_logging(__name__)

DEFAULT_TOLERANCE = QQ(1, 10**9)
EXACT = "exact"
CERTIFIED = "certified"


@dataclass(frozen=True)
class BlockAlgebra:
    block_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.block_dims:
            raise StructuralError("an algebra needs at least one block")
        for n in self.block_dims:
            if not isinstance(n, int) or n < 1:
                raise StructuralError(f"block dimension {n!r} must be a positive integer")

    @classmethod
    def of(cls, *dims: int) -> "BlockAlgebra":
        return cls(tuple(dims))

    @classmethod
    def commutative(cls, points: int) -> "BlockAlgebra":
        """C(X) for a discrete X with ``points`` points."""
        return cls((1,) * points)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dimension(self) -> int:
        return sum(n * n for n in self.block_dims)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    def check_block(self, x: int) -> None:
        if not isinstance(x, int) or x < 0 or x >= self.num_blocks:
            raise StructuralError(f"block index {x} out of range 0..{self.num_blocks - 1}")

    def element(self, blocks: Sequence[DomainMatrix]) -> "AlgebraElement":
        return AlgebraElement(self, tuple(blocks))

    def zero(self) -> "AlgebraElement":
        return self.element([linalg.zeros(n) for n in self.block_dims])

    def one(self) -> "AlgebraElement":
        return self.element([linalg.identity(n) for n in self.block_dims])

    def block_unit(self, x: int) -> "AlgebraElement":
        """Central projection onto block ``x``."""
        self.check_block(x)
        return self.element([linalg.identity(n) if i == x else linalg.zeros(n) for i, n in enumerate(self.block_dims)])

    def embed(self, x: int, mat: DomainMatrix) -> "AlgebraElement":
        self.check_block(x)
        if mat.shape != (self.block_dims[x], self.block_dims[x]):
            raise StructuralError(f"block {x} expects a {self.block_dims[x]}x{self.block_dims[x]} matrix")
        return self.element([mat if i == x else linalg.zeros(n) for i, n in enumerate(self.block_dims)])

    def unit(self, x: int, p: int, q: int) -> "AlgebraElement":
        n = self.block_dims[x]
        if not (0 <= p < n and 0 <= q < n):
            raise StructuralError(f"matrix unit ({p},{q}) outside block {x}")
        return self.embed(x, linalg.matrix_unit(n, p, q))

    def matrix_units(self) -> list["AlgebraElement"]:
        return [self.unit(x, p, q) for x, n in enumerate(self.block_dims) for p in range(n) for q in range(n)]

    def to_json(self) -> dict:
        return {"blocks": list(self.block_dims)}


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: BlockAlgebra
    blocks: tuple[DomainMatrix, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != self.algebra.num_blocks:
            raise StructuralError(f"element has {len(self.blocks)} blocks, algebra has {self.algebra.num_blocks}")
        for x, (mat, n) in enumerate(zip(self.blocks, self.algebra.block_dims)):
            if mat.shape != (n, n):
                raise StructuralError(f"block {x} must be {n}x{n}, got {mat.shape[0]}x{mat.shape[1]}")

    def _key(self) -> tuple:
        return tuple(tuple(tuple(row) for row in linalg.entries(b)) for b in self.blocks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self.algebra, self._key()))

    def _same(self, other: "AlgebraElement") -> None:
        if other.algebra != self.algebra:
            raise StructuralError("elements of different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self) -> "AlgebraElement":
        return self.scale(-1)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, tuple(a * b for a, b in zip(self.blocks, other.blocks)))

    def scale(self, c) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(linalg.scale(b, c) for b in self.blocks))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(linalg.adjoint(b) for b in self.blocks))

    def block(self, x: int) -> DomainMatrix:
        self.algebra.check_block(x)
        return self.blocks[x]

    def is_zero(self) -> bool:
        return all(linalg.is_zero(b) for b in self.blocks)

    def nonzero_blocks(self) -> list[int]:
        return [x for x, b in enumerate(self.blocks) if not linalg.is_zero(b)]


def is_hermitian(a: AlgebraElement) -> bool:
    return all(linalg.is_hermitian(b) for b in a.blocks)


def is_positive(a: AlgebraElement) -> bool:
    return all(linalg.is_psd(b) for b in a.blocks)


def is_projection(p: AlgebraElement) -> bool:
    return p * p == p and p.adjoint() == p


def _require_positive(a: AlgebraElement, what: str) -> None:
    if not is_positive(a):
        raise DomainError(f"{what} expects a positive element")


@dataclass(frozen=True)
class LeftIdealRep:
    """The closed left ideal ``(+)_i M_{n_i} P_{V_i}``."""

    algebra: BlockAlgebra
    spaces: tuple[Subspace, ...]

    def __post_init__(self) -> None:
        if len(self.spaces) != self.algebra.num_blocks:
            raise StructuralError("one subspace per block is required")
        for x, (space, n) in enumerate(zip(self.spaces, self.algebra.block_dims)):
            if space.dim != n:
                raise StructuralError(f"subspace for block {x} lives in dimension {space.dim}, block has {n}")

    @classmethod
    def zero(cls, alg: BlockAlgebra) -> "LeftIdealRep":
        return cls(alg, tuple(Subspace.zero(n) for n in alg.block_dims))

    @classmethod
    def full(cls, alg: BlockAlgebra) -> "LeftIdealRep":
        return cls(alg, tuple(Subspace.full(n) for n in alg.block_dims))

    @classmethod
    def of_spans(cls, alg: BlockAlgebra, spans: Sequence[Iterable[Sequence]]) -> "LeftIdealRep":
        if len(spans) != alg.num_blocks:
            raise StructuralError("one spanning set per block is required")
        return cls(alg, tuple(Subspace.span(n, vecs) for n, vecs in zip(alg.block_dims, spans)))

    @classmethod
    def of_line(cls, alg: BlockAlgebra, x: int, vector: Sequence) -> "LeftIdealRep":
        """Minimal ideal: one line in block ``x``, zero elsewhere."""
        alg.check_block(x)
        spaces = [Subspace.zero(n) for n in alg.block_dims]
        spaces[x] = Subspace.line(vector)
        return cls(alg, tuple(spaces))

    def _same(self, other: "LeftIdealRep") -> None:
        if other.algebra != self.algebra:
            raise StructuralError("ideals of different algebras")

    @property
    def is_zero(self) -> bool:
        return all(v.is_zero for v in self.spaces)

    @property
    def is_full(self) -> bool:
        return all(v.is_full for v in self.spaces)

    @property
    def dimension(self) -> int:
        return sum(n * v.rank for n, v in zip(self.algebra.block_dims, self.spaces))

    def block_support(self) -> frozenset[int]:
        """Y_L: blocks where the ideal does not vanish."""
        return frozenset(x for x, v in enumerate(self.spaces) if not v.is_zero)

    def projection(self) -> AlgebraElement:
        return self.algebra.element([v.projector() for v in self.spaces])

    def contains(self, a: AlgebraElement) -> bool:
        if a.algebra != self.algebra:
            raise StructuralError("element of a different algebra")
        return a * self.projection() == a

    def spanning_set(self) -> list[AlgebraElement]:
        p = self.projection()
        return [u * p for u in self.algebra.matrix_units() if not (u * p).is_zero()]

    def to_json(self) -> dict:
        return {"subspaces": [[[linalg.format_gauss(v) for v in row] for row in s.rows] for s in self.spaces]}


def _check_pair(l1: LeftIdealRep, l2: LeftIdealRep) -> None:
    if l1.algebra != l2.algebra:
        raise StructuralError(f"ideals of algebras {list(l1.algebra.block_dims)} and {list(l2.algebra.block_dims)}")


def ideal_meet(l1: LeftIdealRep, l2: LeftIdealRep) -> LeftIdealRep:
    _check_pair(l1, l2)
    return LeftIdealRep(l1.algebra, tuple(a.meet(b) for a, b in zip(l1.spaces, l2.spaces)))


def ideal_leq(l1: LeftIdealRep, l2: LeftIdealRep) -> bool:
    _check_pair(l1, l2)
    return all(a.leq(b) for a, b in zip(l1.spaces, l2.spaces))


def ideal_join(l1: LeftIdealRep, l2: LeftIdealRep) -> LeftIdealRep:
    """Closed sum ``L1 + L2``."""
    _check_pair(l1, l2)
    return LeftIdealRep(l1.algebra, tuple(a.join(b) for a, b in zip(l1.spaces, l2.spaces)))


@dataclass(frozen=True)
class HereditaryCorner:
    """The corner ``P_V A P_V`` with ``P_V`` blockwise."""

    algebra: BlockAlgebra
    spaces: tuple[Subspace, ...]

    def projection(self) -> AlgebraElement:
        return self.algebra.element([v.projector() for v in self.spaces])

    def contains(self, a: AlgebraElement) -> bool:
        p = self.projection()
        return p * a * p == a

    @property
    def dimension(self) -> int:
        return sum(v.rank * v.rank for v in self.spaces)

    @property
    def is_commutative(self) -> bool:
        return all(v.rank <= 1 for v in self.spaces)


def hereditary_of_ideal(l: LeftIdealRep) -> HereditaryCorner:
    """L intersected with L*, which is the corner cut by the same subspaces."""
    return HereditaryCorner(l.algebra, l.spaces)


def ideal_of_hereditary(b: Union[HereditaryCorner, AlgebraElement]) -> LeftIdealRep:
    """Left ideal {a : a*a in B}; accepts a corner or its projection."""
    if isinstance(b, HereditaryCorner):
        return LeftIdealRep(b.algebra, b.spaces)
    if not is_projection(b):
        raise StructuralError("a hereditary corner is cut by a self-adjoint idempotent")
    return LeftIdealRep(b.algebra, tuple(Subspace.from_projector(p) for p in b.blocks))


def commutant(l: LeftIdealRep) -> LeftIdealRep:
    """L^perp = {a : L a* = 0}, blockwise the orthogonal complement."""
    return LeftIdealRep(l.algebra, tuple(v.perp() for v in l.spaces))


def commutant_by_solve(l: LeftIdealRep) -> LeftIdealRep:
    """L^perp computed directly from the linear conditions ``x a* = 0``."""
    spaces = []
    for x, n in enumerate(l.algebra.block_dims):
        ranges = Subspace.zero(n)
        for gen in l.spanning_set():
            ranges = ranges.join(linalg.column_space(linalg.adjoint(gen.blocks[x])))
        # rows of a must pair to zero with every vector of the ranges, bilinearly
        if ranges.is_zero:
            rows = Subspace.full(n)
        else:
            rows = linalg.kernel(ranges.basis_matrix())
        spaces.append(Subspace.span(n, [[linalg.conj(v) for v in row] for row in rows.rows]))
    return LeftIdealRep(l.algebra, tuple(spaces))


@dataclass(frozen=True)
class NotProper:
    """The bicommutant of a filter is the whole algebra."""

    reason: str


class IdealLattice:
    """Meet-closure of a finite family of left ideals, with 0 and A added."""

    def __init__(self, algebra: BlockAlgebra, generators: Iterable[LeftIdealRep] = ()):
        members = [LeftIdealRep.zero(algebra), LeftIdealRep.full(algebra)]
        seen = set(members)
        for gen in generators:
            if gen.algebra != algebra:
                raise StructuralError("generator of a different algebra")
            if gen not in seen:
                seen.add(gen)
                members.append(gen)
        frontier = list(members)
        while frontier:
            new = []
            for a in frontier:
                for b in list(members):
                    m = ideal_meet(a, b)
                    if m not in seen:
                        seen.add(m)
                        members.append(m)
                        new.append(m)
            frontier = new
        self.algebra = algebra
        self.ideals: tuple[LeftIdealRep, ...] = tuple(members)
        self._index = {ideal: i for i, ideal in enumerate(members)}
        self.lattice = SemiLattice.from_meet(
            [self.name(i) for i in range(len(members))],
            lambda a, b: self._index[ideal_meet(self.ideals[a], self.ideals[b])],
            0,
        )
        logger.debug("ideal lattice with %s members", len(members))

    def name(self, i: int) -> str:
        return "L" + str(i)

    def index(self, ideal: LeftIdealRep) -> int:
        try:
            return self._index[ideal]
        except KeyError as err:
            raise StructuralError("ideal is not a member of the lattice") from err

    def __len__(self) -> int:
        return len(self.ideals)


def filter_bicommutant(lattice: IdealLattice, f: FilterRep) -> Union[LeftIdealRep, NotProper]:
    """Closure of the union of the commutants of the filter's members."""
    if not is_filter(lattice.lattice, f):
        raise StructuralError("filter_bicommutant expects a filter of the ideal lattice")
    result = LeftIdealRep.zero(lattice.algebra)
    for i in f.sorted_members():
        result = ideal_join(result, commutant(lattice.ideals[i]))
    if result.is_full:
        return NotProper("the commutants of the filter span the whole algebra")
    return result


def spectrum(alg: BlockAlgebra) -> list[int]:
    return list(range(alg.num_blocks))


def rep(x: int, a: AlgebraElement) -> DomainMatrix:
    return a.block(x)


def primitive_ideal(alg: BlockAlgebra, x: int) -> LeftIdealRep:
    """Kernel of the block representation ``x``."""
    alg.check_block(x)
    return LeftIdealRep(
        alg, tuple(Subspace.zero(n) if i == x else Subspace.full(n) for i, n in enumerate(alg.block_dims))
    )


def hull(b: HereditaryCorner) -> frozenset[int]:
    return frozenset(x for x, v in enumerate(b.spaces) if v.is_zero)


def is_connected(alg: BlockAlgebra) -> bool:
    return alg.num_blocks == 1


@dataclass(frozen=True)
class CenterReport:
    dimension: int
    basis: tuple[AlgebraElement, ...]

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "central_projections": len(self.basis)}


def _block_commutant_dim(n: int) -> int:
    """Dimension of {z in M_n : [z, e_pq] = 0 for all matrix units}."""
    rows = []
    units = [linalg.matrix_unit(n, p, q) for p in range(n) for q in range(n)]
    for e in units:
        # the columns are the images of the basis matrices under z -> [z, e]
        images = [linalg.entries(linalg.commutator(u, e)) for u in units]
        for r in range(n):
            for c in range(n):
                rows.append([img[r][c] for img in images])
    system = DomainMatrix(rows, (len(rows), n * n), QQ_I)
    return n * n - system.rank()


def center(alg: BlockAlgebra) -> CenterReport:
    """One scalar per block; each block's commutant is solved for exactly."""
    for x, n in enumerate(alg.block_dims):
        dim = _block_commutant_dim(n)
        if dim != 1:
            raise StructuralError(f"block {x} has a commutant of dimension {dim}")
    basis = tuple(alg.block_unit(x) for x in range(alg.num_blocks))
    for z in basis:
        for u in alg.matrix_units():
            if z * u != u * z:
                raise StructuralError("central projection fails to commute")
    return CenterReport(alg.num_blocks, basis)


def support_projection(a: AlgebraElement) -> AlgebraElement:
    """Projection onto the range of ``a``, blockwise."""
    return a.algebra.element([linalg.column_space(b).projector() for b in a.blocks])


def spectral_projection(a: AlgebraElement, x: int, eigenvalue) -> AlgebraElement:
    """Projection onto the eigenspace of ``a`` in block ``x`` (zero elsewhere)."""
    mat = a.block(x)
    if not linalg.is_hermitian(mat):
        raise DomainError("spectral projections need a hermitian block")
    n = mat.shape[0]
    shifted = mat - linalg.scale(linalg.identity(n), linalg.as_gauss(eigenvalue))
    return a.algebra.embed(x, linalg.kernel(shifted).projector())


@dataclass(frozen=True)
class CertifiedElement:
    """An approximation whose norm distance to the exact value is at most ``error``."""

    element: AlgebraElement
    error: object
    exact: bool


def _cutoff(value, threshold):
    return max(value - threshold, QQ(0))


def _derivative_bound(poly: Poly, radius) -> object:
    total = QQ(0)
    coeffs = [QQ.from_sympy(c) for c in poly.all_coeffs()]
    degree = len(coeffs) - 1
    for k, c in enumerate(coeffs):
        power = degree - k
        if power >= 1:
            total += abs(c) * power * radius ** (power - 1)
    return total


def _cut_block(mat: DomainMatrix, threshold, mode: str, tol) -> tuple[DomainMatrix, object]:
    """Apply lambda -> max(lambda - threshold, 0) to a hermitian block."""
    n = mat.shape[0]
    result = linalg.zeros(n)
    error = QQ(0)
    for item in linalg.spectral_factors(mat):
        proj = item.space.projector()
        if item.is_rational:
            value = _cutoff(item.eigenvalue, threshold)
            result = result + linalg.scale(proj, linalg.as_gauss(value))
            continue
        above = item.roots_above(threshold)
        if above == 0:
            continue
        if above == item.root_count():
            shifted = mat - linalg.scale(linalg.identity(n), linalg.as_gauss(threshold))
            result = result + shifted * proj
            continue
        if mode != CERTIFIED:
            raise ModeError(
                f"irrational eigenvalues of {item.factor.as_expr()} straddle the cutoff, use certified mode"
            )
        width = QQ.convert(tol)
        for _ in range(64):
            intervals = linalg.root_intervals(item.factor, width)
            mids = [(lo + hi) / 2 for lo, hi in intervals]
            points = [(QQ.to_sympy(m), QQ.to_sympy(_cutoff(m, threshold))) for m in mids]
            approx = Poly(interpolate(points, linalg.T), linalg.T, domain=QQ)
            radius = max(max(abs(lo), abs(hi)) for lo, hi in intervals)
            bound = width * (1 + _derivative_bound(approx, radius))
            if bound <= tol:
                break
            width = width / 4
        logger.warning("certified spectral cutoff for %s, error below %s", item.factor.as_expr(), bound)
        result = result + linalg.poly_at(approx, mat) * proj
        error = max(error, bound)
    return result, error


def _cut(a: AlgebraElement, threshold, mode: str, tol) -> CertifiedElement:
    if mode not in (EXACT, CERTIFIED):
        raise StructuralError(f"unknown mode {mode!r}")
    blocks = []
    error = QQ(0)
    for b in a.blocks:
        out, err = _cut_block(b, threshold, mode, tol)
        blocks.append(out)
        error = max(error, err)
    return CertifiedElement(a.algebra.element(blocks), error, error == 0)


def f_eps_certified(a: AlgebraElement, eps, tol=DEFAULT_TOLERANCE) -> CertifiedElement:
    eps = QQ.convert(eps)
    if eps <= 0:
        raise DomainError("f_eps needs a positive epsilon")
    _require_positive(a, "f_eps")
    return _cut(a, eps, CERTIFIED, QQ.convert(tol))


def f_eps(a: AlgebraElement, eps, mode: str = EXACT, tol=DEFAULT_TOLERANCE) -> AlgebraElement:
    """Spectral cutoff lambda -> max(lambda - eps, 0) of a positive element."""
    eps = QQ.convert(eps)
    if eps <= 0:
        raise DomainError("f_eps needs a positive epsilon")
    _require_positive(a, "f_eps")
    return _cut(a, eps, mode, QQ.convert(tol)).element


@dataclass(frozen=True)
class PedersenWitness:
    member: bool
    b: AlgebraElement
    eps: object
    verified: str


def pedersen_k0_member(a: AlgebraElement) -> PedersenWitness:
    """Every positive element is f_1(a + q) with q the support projection of a."""
    _require_positive(a, "pedersen_k0_member")
    q = support_projection(a)
    b = a + q
    try:
        check = f_eps(b, 1)
        verified = EXACT
    except ModeError:
        # f_1(b) = (b - 1) q = a q on the support, and a q = a
        check = a * q
        verified = CERTIFIED
    if check != a:
        raise StructuralError("pedersen witness failed to reproduce the element")
    return PedersenWitness(True, b, QQ(1), verified)


def four_decomposition(a: AlgebraElement, mode: str = EXACT, tol=DEFAULT_TOLERANCE) -> tuple[AlgebraElement, ...]:
    """Positive a1..a4 with a = a1 - a2 + i a3 - i a4 and a1 a2 = a3 a4 = 0."""
    half = QQ_I(QQ(1, 2), 0)
    h = (a + a.adjoint()).scale(half)
    k = (a - a.adjoint()).scale(QQ_I(0, QQ(-1, 2)))
    parts = []
    for hermitian in (h, k):
        parts.append(_cut(hermitian, QQ(0), mode, tol).element)
        parts.append(_cut(-hermitian, QQ(0), mode, tol).element)
    if mode == EXACT:
        recomposed = parts[0] - parts[1] + parts[2].scale(linalg.I_UNIT) - parts[3].scale(linalg.I_UNIT)
        if recomposed != a:
            raise StructuralError("four decomposition does not recompose")
    return tuple(parts)


@dataclass(frozen=True)
class NormEnclosure:
    lo: object
    hi: object

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise StructuralError("enclosure with lo above hi")

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, value) -> bool:
        value = QQ.convert(value)
        return self.lo <= value <= self.hi

    def __add__(self, other: "NormEnclosure") -> "NormEnclosure":
        return NormEnclosure(self.lo + other.lo, self.hi + other.hi)

    def to_json(self) -> dict:
        return {"lo": linalg.format_rational(self.lo), "hi": linalg.format_rational(self.hi)}


def _block_norm(mat: DomainMatrix, width) -> tuple:
    gram = linalg.adjoint(mat) * mat
    lam_lo, lam_hi, _ = linalg.largest_eigenvalue(gram, width)
    lo, _ = linalg.sqrt_bounds(max(lam_lo, QQ(0)), width)
    _, hi = linalg.sqrt_bounds(max(lam_hi, QQ(0)), width)
    return lo, hi


def op_norm(a: AlgebraElement, tol=DEFAULT_TOLERANCE) -> NormEnclosure:
    """Largest singular value over all blocks, enclosed within ``tol``."""
    tol = QQ.convert(tol)
    if tol <= 0:
        raise DomainError("op_norm needs a positive tolerance")
    width = tol
    for _ in range(64):
        bounds = [_block_norm(b, width) for b in a.blocks]
        lo = max(b[0] for b in bounds)
        hi = max(b[1] for b in bounds)
        if hi - lo <= tol:
            return NormEnclosure(lo, hi)
        width = width / 4
    logger.warning("norm enclosure stopped at width %s", hi - lo)
    return NormEnclosure(lo, hi)


def strict_seminorm(a: AlgebraElement, x: AlgebraElement, tol=DEFAULT_TOLERANCE) -> NormEnclosure:
    """||a x|| + ||x a||."""
    half = QQ.convert(tol) / 2
    return op_norm(a * x, half) + op_norm(x * a, half)


def pythagorean_rotation(n: int, p: int = 0, q: int = 1, triple: tuple[int, int, int] = (3, 4, 5)) -> DomainMatrix:
    """Exact real rotation by a Pythagorean angle in the (p, q) plane."""
    a, b, c = triple
    if a * a + b * b != c * c:
        raise StructuralError(f"{triple} is not a Pythagorean triple")
    rows = linalg.entries(linalg.identity(n))
    rows[p][p] = QQ_I(QQ(a, c), 0)
    rows[p][q] = QQ_I(QQ(b, c), 0)
    rows[q][p] = QQ_I(QQ(-b, c), 0)
    rows[q][q] = QQ_I(QQ(a, c), 0)
    return DomainMatrix(rows, (n, n), QQ_I)


@dataclass(frozen=True, eq=False)
class Automorphism:
    """a -> (U_i a_i U_i^-1) placed in block ``permutation[i]``."""

    algebra: BlockAlgebra
    permutation: tuple[int, ...]
    conjugators: tuple[DomainMatrix, ...]
    scalars: tuple[GaussianRational, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        alg = self.algebra
        if sorted(self.permutation) != list(range(alg.num_blocks)):
            raise StructuralError("block permutation must be a bijection")
        for i, j in enumerate(self.permutation):
            if alg.block_dims[i] != alg.block_dims[j]:
                raise StructuralError(f"block {i} cannot move to block {j} of another dimension")
        if len(self.conjugators) != alg.num_blocks:
            raise StructuralError("one conjugator per block is required")
        scalars = []
        for i, u in enumerate(self.conjugators):
            n = alg.block_dims[i]
            if u.shape != (n, n):
                raise StructuralError(f"conjugator {i} must be {n}x{n}")
            gram = linalg.adjoint(u) * u
            c = linalg.entries(gram)[0][0]
            if c == ZERO or not linalg.equal(gram, linalg.scale(linalg.identity(n), c)):
                raise StructuralError(f"conjugator {i} is not unitary up to a scalar")
            scalars.append(c)
        object.__setattr__(self, "scalars", tuple(scalars))

    @classmethod
    def identity(cls, alg: BlockAlgebra) -> "Automorphism":
        return cls(alg, tuple(range(alg.num_blocks)), tuple(linalg.identity(n) for n in alg.block_dims))

    @classmethod
    def inner(cls, u: AlgebraElement) -> "Automorphism":
        alg = u.algebra
        return cls(alg, tuple(range(alg.num_blocks)), u.blocks)

    @classmethod
    def block_permutation(cls, alg: BlockAlgebra, permutation: Sequence[int]) -> "Automorphism":
        return cls(alg, tuple(permutation), tuple(linalg.identity(n) for n in alg.block_dims))

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        if a.algebra != self.algebra:
            raise StructuralError("element of a different algebra")
        out: list[Optional[DomainMatrix]] = [None] * self.algebra.num_blocks
        for i, j in enumerate(self.permutation):
            u = self.conjugators[i]
            u_inv = linalg.scale(linalg.adjoint(u), ONE / self.scalars[i])
            out[j] = u * a.blocks[i] * u_inv
        return self.algebra.element(out)

    __call__ = apply

    def compose(self, after: "Automorphism") -> "Automorphism":
        """``after`` applied after ``self``."""
        perm = tuple(after.permutation[j] for j in self.permutation)
        conj = tuple(after.conjugators[j] * self.conjugators[i] for i, j in enumerate(self.permutation))
        return Automorphism(self.algebra, perm, conj)

    def inverse(self) -> "Automorphism":
        n = self.algebra.num_blocks
        perm = [0] * n
        conj: list[Optional[DomainMatrix]] = [None] * n
        for i, j in enumerate(self.permutation):
            perm[j] = i
            conj[j] = linalg.adjoint(self.conjugators[i])
        return Automorphism(self.algebra, tuple(perm), tuple(conj))

    def same_action(self, other: "Automorphism") -> bool:
        return all(self.apply(u) == other.apply(u) for u in self.algebra.matrix_units())

    def is_identity(self) -> bool:
        return all(self.apply(u) == u for u in self.algebra.matrix_units())


@dataclass(frozen=True)
class DistanceReport:
    enclosure: NormEnclosure
    attained: bool
    witness: str

    def to_json(self) -> dict:
        return {"enclosure": self.enclosure.to_json(), "attained": self.attained, "witness": self.witness}


def _candidate_net(alg: BlockAlgebra) -> list[tuple[str, AlgebraElement]]:
    net: list[tuple[str, AlgebraElement]] = []
    for x, n in enumerate(alg.block_dims):
        for p in range(n):
            for q in range(n):
                net.append((f"e{p}{q}@{x}", alg.unit(x, p, q)))
        for p in range(n):
            for q in range(p + 1, n):
                rot = alg.embed(x, pythagorean_rotation(n, p, q))
                for r in range(n):
                    for s in range(n):
                        unit = alg.unit(x, r, s)
                        net.append((f"rot{p}{q}(e{r}{s})@{x}", rot * unit * rot.adjoint()))
    k = alg.num_blocks
    if k > 1 and k <= 6:
        for signs in product((1, -1), repeat=k - 1):
            blocks = [linalg.identity(alg.block_dims[0])]
            blocks += [linalg.scale(linalg.identity(n), s) for n, s in zip(alg.block_dims[1:], signs)]
            label = "(" + ",".join(["+"] + ["+" if s > 0 else "-" for s in signs]) + ")"
            net.append((label, alg.element(blocks)))
    return net


def aut_uniform_distance(alpha: Automorphism, tol=DEFAULT_TOLERANCE) -> DistanceReport:
    """Enclosure of sup over the unit ball of ||alpha(a) - a||."""
    alg = alpha.algebra
    tol = QQ.convert(tol)
    best_lo, witness = QQ(0), "none"
    for label, a in _candidate_net(alg):
        diff = op_norm(alpha.apply(a) - a, tol)
        size = op_norm(a, tol)
        if diff.lo == 0 or size.hi == 0:
            continue
        value = diff.lo / size.hi
        if value > best_lo:
            best_lo, witness = value, label
    # a = sum a_pq e_pq with |a_pq| <= ||a||, so the unit sum bounds the distance
    unit_total = QQ(0)
    for u in alg.matrix_units():
        unit_total += op_norm(alpha.apply(u) - u, tol).hi
    hi = min(QQ(2), unit_total)
    best_lo = min(best_lo, hi)
    enclosure = NormEnclosure(best_lo, hi)
    logger.info("automorphism distance in [%s, %s] witnessed by %s", best_lo, hi, witness)
    return DistanceReport(enclosure, enclosure.exact, witness)


def is_abelian_element(x: AlgebraElement) -> bool:
    """Positive x with commutative corner xAx, decided by blockwise rank."""
    _require_positive(x, "is_abelian_element")
    return all(linalg.rank(b) <= 1 for b in x.blocks)


def corner_is_commutative(x: AlgebraElement) -> bool:
    """Brute force: x e x commute pairwise over all matrix units e."""
    gens = [x * u * x for u in x.algebra.matrix_units()]
    return all(a * b == b * a for a in gens for b in gens)


def random_gauss(rng: random.Random, span: int = 2) -> GaussianRational:
    return QQ_I(QQ(rng.randint(-span, span)), QQ(rng.randint(-span, span)))


def random_vector(rng: random.Random, n: int) -> list[GaussianRational]:
    while True:
        vec = [random_gauss(rng) for _ in range(n)]
        if any(v != ZERO for v in vec):
            return vec


def random_ideal(alg: BlockAlgebra, rng: random.Random) -> LeftIdealRep:
    spans = []
    for n in alg.block_dims:
        count = rng.randint(0, n)
        spans.append([random_vector(rng, n) for _ in range(count)])
    return LeftIdealRep.of_spans(alg, spans)


def random_positive(alg: BlockAlgebra, rng: random.Random) -> AlgebraElement:
    """Exact positive element with rational spectrum: R diag(d) R*."""
    blocks = []
    for n in alg.block_dims:
        diag = linalg.diagonal([QQ_I(QQ(rng.randint(0, 4), rng.randint(1, 3)), 0) for _ in range(n)])
        if n > 1:
            p = rng.randrange(n - 1)
            rot = pythagorean_rotation(n, p, p + 1, rng.choice([(3, 4, 5), (5, 12, 13), (8, 15, 17)]))
            diag = rot * diag * linalg.adjoint(rot)
        blocks.append(diag)
    return alg.element(blocks)


def minimal_ideals_sample(alg: BlockAlgebra, count: int, seed: int = 0) -> list[LeftIdealRep]:
    """Deterministic sample of minimal left ideals (one line in one block)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        x = rng.randrange(alg.num_blocks)
        out.append(LeftIdealRep.of_line(alg, x, random_vector(rng, alg.block_dims[x])))
    return out
