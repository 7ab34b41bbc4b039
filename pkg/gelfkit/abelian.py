"""Finitely generated abelian groups and integer-matrix homomorphisms.

Every group is a direct sum of cyclic groups given by a tuple of orders
(0 meaning infinite cyclic). ``FgAbGroup`` is the canonical form: invariant
factors ``d_1 | d_2 | ...`` first, then the free rank. Kernels, images,
cokernels and homology are computed as subquotients of integer lattices with
the Smith normal form.
"""
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Iterable, Optional, Sequence, Union

from sympy.core.intfunc import igcdex
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from gelfkit.error import ResourceError, StructuralError
from gelfkit.utils import setup_logging

logger = setup_logging(__name__)

Vector = tuple[int, ...]
Rows = list[list[int]]


# Integer matrices are row lists with an explicit shape so that empty
# matrices (no rows or no columns) stay meaningful.


def zero_matrix(r: int, c: int) -> Rows:
    return [[0] * c for _ in range(r)]


def identity_matrix(n: int) -> Rows:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(rows: Rows, r: int, c: int) -> Rows:
    return [[rows[i][j] for i in range(r)] for j in range(c)]


def _to_dm(rows: Rows, r: int, c: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(v) for v in row] for row in rows], (r, c), ZZ)


def _from_dm(mat: DomainMatrix) -> Rows:
    return [[int(v) for v in row] for row in mat.to_list()]


def matmul(a: Rows, b: Rows, r: int, k: int, c: int) -> Rows:
    if r == 0 or c == 0:
        return zero_matrix(r, c)
    if k == 0:
        return zero_matrix(r, c)
    return _from_dm(_to_dm(a, r, k) * _to_dm(b, k, c))


def matvec(a: Rows, x: Sequence[int], r: int, c: int) -> list[int]:
    return [row[0] for row in matmul(a, [[v] for v in x], r, c, 1)]


def columns(rows: Rows, r: int, c: int) -> list[list[int]]:
    return [[rows[i][j] for i in range(r)] for j in range(c)]


def from_columns(cols: Sequence[Sequence[int]], r: int) -> Rows:
    return [[col[i] for col in cols] for i in range(r)]


def lattice_basis(cols: Sequence[Sequence[int]], r: int) -> list[list[int]]:
    """Columns spanning the same lattice, at most ``r`` of them (Hermite normal form)."""
    cols = [list(v) for v in cols if any(v)]
    if len(cols) <= r:
        return cols
    hnf = hermite_normal_form(_to_dm(from_columns(cols, r), r, len(cols)))
    width = hnf.shape[1]
    return [col for col in columns(_from_dm(hnf), r, width) if any(col)]


def inverse_unimodular(u: Rows, n: int) -> Rows:
    if n == 0:
        return []
    inv = _to_dm(u, n, n).to_field().inv()
    return _from_dm(inv.convert_to(ZZ))


@dataclass(frozen=True)
class SmithForm:
    """``left * m * right == diag(diagonal)`` with unimodular transforms."""

    rows: int
    cols: int
    diagonal: tuple[int, ...]
    left: tuple[tuple[int, ...], ...] = field(repr=False)
    right: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d != 0)

    def diagonal_matrix(self) -> Rows:
        out = zero_matrix(self.rows, self.cols)
        for i, d in enumerate(self.diagonal):
            out[i][i] = d
        return out


def _swap_rows(m: Rows, i: int, j: int) -> None:
    m[i], m[j] = m[j], m[i]


def _swap_cols(m: Rows, i: int, j: int) -> None:
    for row in m:
        row[i], row[j] = row[j], row[i]


def _normalize_diagonal(diag: list[int], left: Rows, right: Rows) -> None:
    """Make the diagonal nonnegative, zeros last, and a divisibility chain."""
    for i, d in enumerate(diag):
        if d < 0:
            diag[i] = -d
            left[i] = [-v for v in left[i]]
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                a, b = diag[i], diag[j]
                if a == 0 and b != 0:
                    diag[i], diag[j] = b, a
                    _swap_rows(left, i, j)
                    _swap_cols(right, i, j)
                    changed = True
                elif a != 0 and b != 0 and b % a != 0:
                    x, y, g = igcdex(a, b)
                    row_i, row_j = left[i], left[j]
                    left[i] = [x * p + y * q for p, q in zip(row_i, row_j)]
                    left[j] = [(-b // g) * p + (a // g) * q for p, q in zip(row_i, row_j)]
                    for row in right:
                        ci, cj = row[i], row[j]
                        row[i] = ci + cj
                        row[j] = -(y * b // g) * ci + (x * a // g) * cj
                    diag[i], diag[j] = g, a * b // g
                    changed = True


def smith_normal_form(m: Rows, r: Optional[int] = None, c: Optional[int] = None) -> SmithForm:
    """Smith normal form with unimodular transforms, diagonal a divisibility chain."""
    r = len(m) if r is None else r
    c = (len(m[0]) if m else 0) if c is None else c
    if r == 0 or c == 0:
        return SmithForm(r, c, (), tuple(map(tuple, identity_matrix(r))), tuple(map(tuple, identity_matrix(c))))
    _, s, t = smith_normal_decomp(_to_dm(m, r, c))
    left, right = _from_dm(s), _from_dm(t)
    product_rows = matmul(matmul(left, m, r, r, c), right, r, c, c)
    diag = []
    for i in range(r):
        for j in range(c):
            if i != j and product_rows[i][j] != 0:
                raise StructuralError("smith normal decomposition returned a non diagonal form")
        if i < c:
            diag.append(product_rows[i][i])
    _normalize_diagonal(diag, left, right)
    logger.debug("smith normal form of a %sx%s matrix: %s", r, c, diag)
    return SmithForm(r, c, tuple(diag), tuple(map(tuple, left)), tuple(map(tuple, right)))


def integer_kernel(m: Rows, r: int, c: int) -> list[list[int]]:
    """Basis of {x in Z^c : m x = 0}."""
    if c == 0:
        return []
    if r == 0:
        return identity_matrix(c)
    snf = smith_normal_form(m, r, c)
    right = [list(row) for row in snf.right]
    return [[right[i][j] for i in range(c)] for j in range(snf.rank, c)]


def solve_integer(m: Rows, r: int, c: int, b: Sequence[int]) -> Optional[list[int]]:
    """Some integer x with m x = b, or None."""
    if r == 0:
        return [0] * c
    if c == 0:
        return [] if all(v == 0 for v in b) else None
    snf = smith_normal_form(m, r, c)
    sb = matvec([list(row) for row in snf.left], b, r, r)
    w = [0] * c
    for i in range(r):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if d == 0:
            if sb[i] != 0:
                return None
        else:
            if sb[i] % d:
                return None
            w[i] = sb[i] // d
    return matvec([list(row) for row in snf.right], w, c, c)


class AbelianGroup:
    """Direct sum of cyclic groups; coordinate ``i`` has order ``orders[i]``."""

    @property
    def orders(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def dim(self) -> int:
        return len(self.orders)

    def reduce(self, x: Sequence[int]) -> Vector:
        if len(x) != self.dim:
            raise StructuralError(f"element of length {len(x)} in a group with {self.dim} generators")
        return tuple(v % d if d else v for v, d in zip(x, self.orders))

    def zero(self) -> Vector:
        return (0,) * self.dim

    def is_zero_element(self, x: Sequence[int]) -> bool:
        return all(v == 0 for v in self.reduce(x))

    def generator(self, i: int) -> Vector:
        return tuple(1 if j == i else 0 for j in range(self.dim))

    def relation_columns(self) -> list[list[int]]:
        return [[d if j == i else 0 for j in range(self.dim)] for i, d in enumerate(self.orders) if d]

    @property
    def is_trivial(self) -> bool:
        return all(d == 1 for d in self.orders)

    @property
    def is_finite(self) -> bool:
        return all(d != 0 for d in self.orders)

    def order(self) -> int:
        if not self.is_finite:
            raise StructuralError("infinite group has no finite order")
        total = 1
        for d in self.orders:
            total *= d
        return total

    def elements(self, window: int = 0, limit: int = 4096) -> list[Vector]:
        """All elements; free coordinates range over [-window, window]."""
        ranges = [range(d) if d else range(-window, window + 1) for d in self.orders]
        count = 1
        for rng in ranges:
            count *= len(rng)
        if count > limit:
            raise ResourceError(f"group enumeration would list {count} elements")
        return [tuple(v) for v in product(*ranges)]


@dataclass(frozen=True)
class CyclicSum(AbelianGroup):
    cyclic_orders: tuple[int, ...]

    def __post_init__(self) -> None:
        for d in self.cyclic_orders:
            if d < 0:
                raise StructuralError(f"cyclic order {d} is negative")

    @property
    def orders(self) -> tuple[int, ...]:
        return self.cyclic_orders

    @classmethod
    def direct_sum(cls, groups: Iterable[AbelianGroup]) -> "CyclicSum":
        orders: list[int] = []
        for g in groups:
            orders.extend(g.orders)
        return cls(tuple(orders))

    def invariants(self) -> "FgAbGroup":
        return quotient_lattice([list(g) for g in identity_matrix(self.dim)], self.relation_columns(), self.dim).group


@dataclass(frozen=True)
class FgAbGroup(AbelianGroup):
    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise StructuralError("rank must be non negative")
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise StructuralError(f"invariant factor {d} must be at least 2")
            if i and d % self.torsion[i - 1]:
                raise StructuralError(f"invariant factors {list(self.torsion)} do not form a divisibility chain")

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls(rank, ())

    @classmethod
    def cyclic(cls, order: int) -> "FgAbGroup":
        if order == 0:
            return cls(1, ())
        if order == 1:
            return cls(0, ())
        return cls(0, (order,))

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0, ())

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(self.torsion) + (0,) * self.rank

    def to_json(self) -> dict:
        out: dict = {"rank": self.rank}
        if self.torsion:
            out["torsion"] = list(self.torsion)
        return out

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.rank:
            parts.insert(0, "Z" if self.rank == 1 else f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"


def canonical(orders: Sequence[int]) -> FgAbGroup:
    """Invariant-factor form of a direct sum of cyclic groups."""
    return CyclicSum(tuple(orders)).invariants()


@dataclass(frozen=True)
class Subquotient:
    """``numerator / denominator`` for lattices in ``Z^ambient``, in canonical form.

    ``lifts[i]`` is an ambient vector representing the ``i``-th canonical
    generator of ``group``; ``coords`` maps numerator vectors back.
    """

    group: FgAbGroup
    ambient: int
    lifts: tuple[Vector, ...]
    basis_left: tuple[tuple[int, ...], ...] = field(repr=False)
    basis_diag: tuple[int, ...] = field(repr=False)
    quotient_left: tuple[tuple[int, ...], ...] = field(repr=False)
    kept: tuple[tuple[int, int], ...] = field(repr=False)

    def basis_coords(self, x: Sequence[int]) -> list[int]:
        k = len(self.basis_diag)
        if self.ambient == 0:
            return []
        ux = matvec([list(row) for row in self.basis_left], x, self.ambient, self.ambient)
        coords = []
        for i, value in enumerate(ux):
            if i < k:
                if value % self.basis_diag[i]:
                    raise StructuralError("vector is not in the numerator lattice")
                coords.append(value // self.basis_diag[i])
            elif value != 0:
                raise StructuralError("vector is not in the numerator lattice")
        return coords

    def coords(self, x: Sequence[int]) -> Vector:
        c = self.basis_coords(x)
        k = len(c)
        y = matvec([list(row) for row in self.quotient_left], c, k, k) if k else []
        return tuple(y[pos] % order if order else y[pos] for pos, order in self.kept)


def quotient_lattice(numerator: Sequence[Sequence[int]], denominator: Sequence[Sequence[int]], ambient: int) -> Subquotient:
    """Subquotient of Z^ambient: span(numerator) / span(denominator)."""
    numerator = lattice_basis(numerator, ambient)
    if not numerator:
        return Subquotient(FgAbGroup.trivial(), ambient, (), tuple(map(tuple, identity_matrix(ambient))), (), (), ())
    s = len(numerator)
    gen = from_columns(numerator, ambient)
    snf = smith_normal_form(gen, ambient, s)
    k = snf.rank
    left = [list(row) for row in snf.left]
    left_inv = inverse_unimodular(left, ambient)
    diag = snf.diagonal[:k]
    basis_cols = [[diag[i] * left_inv[row][i] for row in range(ambient)] for i in range(k)]

    partial = Subquotient(FgAbGroup.trivial(), ambient, (), tuple(map(tuple, left)), tuple(diag), (), ())
    rel_cols = lattice_basis([partial.basis_coords(v) for v in denominator if any(v)], k)
    t = len(rel_cols)
    rel = from_columns(rel_cols, k) if t else zero_matrix(k, 0)
    rel_snf = smith_normal_form(rel, k, t)
    q_left = [list(row) for row in rel_snf.left]
    q_left_inv = inverse_unimodular(q_left, k)
    torsion: list[int] = []
    kept: list[tuple[int, int]] = []
    free: list[tuple[int, int]] = []
    for i in range(k):
        d = rel_snf.diagonal[i] if i < len(rel_snf.diagonal) else 0
        if d == 0:
            free.append((i, 0))
        elif d > 1:
            torsion.append(d)
            kept.append((i, d))
    kept.extend(free)
    basis = from_columns(basis_cols, ambient)
    lifts = []
    for pos, _ in kept:
        col = [q_left_inv[row][pos] for row in range(k)]
        lifts.append(tuple(matvec(basis, col, ambient, k)))
    group = FgAbGroup(len(free), tuple(torsion))
    return Subquotient(group, ambient, tuple(lifts), tuple(map(tuple, left)), tuple(diag), tuple(map(tuple, q_left)), tuple(kept))


@dataclass(frozen=True)
class AbHom:
    """Homomorphism given by an integer matrix (target.dim x source.dim)."""

    source: AbelianGroup
    target: AbelianGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = [list(row) for row in self.matrix]
        if len(rows) != self.target.dim or any(len(row) != self.source.dim for row in rows):
            raise StructuralError(
                f"homomorphism matrix must be {self.target.dim}x{self.source.dim}"
            )
        for i, d in enumerate(self.target.orders):
            if d:
                rows[i] = [v % d for v in rows[i]]
        object.__setattr__(self, "matrix", tuple(tuple(row) for row in rows))
        for k, order in enumerate(self.source.orders):
            if order == 0:
                continue
            image = [order * rows[i][k] for i in range(self.target.dim)]
            if not self.target.is_zero_element(image):
                raise StructuralError(f"generator {k} of order {order} is not sent to an element of compatible order")

    @classmethod
    def make(cls, source: AbelianGroup, target: AbelianGroup, rows: Sequence[Sequence[int]]) -> "AbHom":
        return cls(source, target, tuple(tuple(int(v) for v in row) for row in rows))

    @classmethod
    def identity(cls, group: AbelianGroup) -> "AbHom":
        return cls.make(group, group, identity_matrix(group.dim))

    @classmethod
    def zero(cls, source: AbelianGroup, target: AbelianGroup) -> "AbHom":
        return cls.make(source, target, zero_matrix(target.dim, source.dim))

    @classmethod
    def from_images(cls, source: AbelianGroup, target: AbelianGroup, images: Sequence[Sequence[int]]) -> "AbHom":
        """Images of the source generators, one target vector each."""
        return cls.make(source, target, from_columns(images, target.dim) if images else zero_matrix(target.dim, 0))

    def rows(self) -> Rows:
        return [list(row) for row in self.matrix]

    def __call__(self, x: Sequence[int]) -> Vector:
        if len(x) != self.source.dim:
            raise StructuralError("element does not belong to the source group")
        return self.target.reduce(matvec(self.rows(), x, self.target.dim, self.source.dim))

    def compose(self, after: "AbHom") -> "AbHom":
        """``after`` applied after ``self``."""
        if after.source.orders != self.target.orders:
            raise StructuralError("homomorphisms do not compose")
        rows = matmul(after.rows(), self.rows(), after.target.dim, self.target.dim, self.source.dim)
        return AbHom.make(self.source, after.target, rows)

    def add(self, other: "AbHom") -> "AbHom":
        rows = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows(), other.rows())]
        return AbHom.make(self.source, self.target, rows)

    def negate(self) -> "AbHom":
        return AbHom.make(self.source, self.target, [[-v for v in row] for row in self.rows()])

    def same_map(self, other: "AbHom") -> bool:
        return (
            self.source.orders == other.source.orders
            and self.target.orders == other.target.orders
            and self.matrix == other.matrix
        )

    def _kernel_lattice(self) -> list[list[int]]:
        n, m = self.source.dim, self.target.dim
        rel = self.target.relation_columns()
        cols = columns(self.rows(), m, n) + rel
        stacked = from_columns(cols, m) if cols else zero_matrix(m, 0)
        kernel = integer_kernel(stacked, m, len(cols))
        return [vec[:n] for vec in kernel]

    def kernel(self) -> Subquotient:
        return quotient_lattice(self._kernel_lattice(), self.source.relation_columns(), self.source.dim)

    def image(self) -> Subquotient:
        rel = self.target.relation_columns()
        gens = columns(self.rows(), self.target.dim, self.source.dim) + rel
        return quotient_lattice(gens, rel, self.target.dim)

    def cokernel(self) -> Subquotient:
        rel = self.target.relation_columns()
        gens = columns(self.rows(), self.target.dim, self.source.dim) + rel
        return quotient_lattice(identity_matrix(self.target.dim), gens, self.target.dim)

    def is_injective(self) -> bool:
        return self.kernel().group.is_trivial

    def is_surjective(self) -> bool:
        return self.cokernel().group.is_trivial

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def preimage(self, y: Sequence[int]) -> Optional[Vector]:
        """Some source element mapping to ``y``, or None."""
        m = self.target.dim
        rel = self.target.relation_columns()
        cols = columns(self.rows(), m, self.source.dim) + rel
        stacked = from_columns(cols, m) if cols else zero_matrix(m, 0)
        solution = solve_integer(stacked, m, len(cols), list(y))
        if solution is None:
            return None
        return self.source.reduce(solution[: self.source.dim])

    def inverse(self) -> "AbHom":
        if not self.is_isomorphism():
            raise StructuralError("only isomorphisms are inverted")
        images = []
        for j in range(self.target.dim):
            x = self.preimage(self.target.generator(j))
            if x is None:
                raise StructuralError("isomorphism without a preimage")
            images.append(list(x))
        return AbHom.from_images(self.target, self.source, images)


def homology(incoming: Optional[AbHom], outgoing: Optional[AbHom], group: AbelianGroup) -> Subquotient:
    """ker(outgoing) / im(incoming) at ``group``."""
    if outgoing is not None:
        numerator = outgoing._kernel_lattice()
    else:
        numerator = identity_matrix(group.dim)
    denominator = list(group.relation_columns())
    if incoming is not None:
        denominator += columns(incoming.rows(), group.dim, incoming.source.dim)
    return quotient_lattice(numerator, denominator, group.dim)


def subquotient_map(hom: AbHom, source: Subquotient, target: Subquotient) -> AbHom:
    """Map between subquotients induced by a map of the ambient groups."""
    images = [list(target.coords(hom(lift))) for lift in source.lifts]
    return AbHom.from_images(source.group, target.group, images)


def _cyclic_parts(g: FgAbGroup) -> list[int]:
    return list(g.torsion) + [0] * g.rank


def tensor(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    orders = [gcd(p, q) for p in _cyclic_parts(a) for q in _cyclic_parts(b)]
    return canonical(orders)


def tor(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    orders = [gcd(p, q) for p in a.torsion for q in b.torsion]
    return canonical(orders)


def direct_sum(groups: Iterable[FgAbGroup]) -> FgAbGroup:
    orders: list[int] = []
    for g in groups:
        orders.extend(_cyclic_parts(g))
    return canonical(orders)


def parse_group(text: str) -> FgAbGroup:
    """"Z", "Z/2", "Z^2+Z/4", "0"."""
    text = text.replace(" ", "")
    if text in ("0", ""):
        return FgAbGroup.trivial()
    orders: list[int] = []
    for part in text.split("+"):
        if part == "Z":
            orders.append(0)
        elif part.startswith("Z^"):
            orders.extend([0] * int(part[2:]))
        elif part.startswith("Z/"):
            orders.append(int(part[2:]))
        else:
            raise StructuralError(f"cannot read group {text!r}")
    return canonical(orders)


__all__ = [
    "AbHom",
    "AbelianGroup",
    "CyclicSum",
    "FgAbGroup",
    "SmithForm",
    "Subquotient",
    "canonical",
    "direct_sum",
    "homology",
    "integer_kernel",
    "parse_group",
    "quotient_lattice",
    "smith_normal_form",
    "solve_integer",
    "subquotient_map",
    "tensor",
    "tor",
]
