"""Exact linear algebra over the Gaussian rationals.

Matrices are sympy ``DomainMatrix`` objects over ``QQ_I``. Subspaces of
``QQ_I^n`` are stored by the reduced row echelon form of a basis (vectors
written as rows), which makes equality of subspaces structural.
"""
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from sympy import Poly, Symbol, integer_nthroot
from sympy.external.gmpy import MPQ
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix

from gelfkit.error import InputError, StructuralError
from gelfkit.utils import setup_logging

logger = setup_logging(__name__)

T = Symbol("t")

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def rational(value) -> MPQ:
    """Coerce an int, a sympy number or a "p/q" literal into ``QQ``."""
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL.match(text):
            raise InputError(f"not a rational literal: {value!r}")
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise InputError(f"zero denominator: {value!r}")
            return QQ(int(num), int(den))
        return QQ(int(text))
    return QQ.convert(value)


def format_rational(value) -> str:
    value = QQ.convert(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def gauss(re_part=0, im_part=0) -> GaussianRational:
    return QQ_I(rational(re_part), rational(im_part))


ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)


def conj(z: GaussianRational) -> GaussianRational:
    return QQ_I(z.x, -z.y)


def abs2(z: GaussianRational):
    """|z|^2 as an element of QQ."""
    return z.x * z.x + z.y * z.y


def as_gauss(value) -> GaussianRational:
    """Coerce ints, rationals and literals into ``QQ_I``."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, str):
        return parse_gauss(value)
    return QQ_I(rational(value), 0)


def parse_gauss(text) -> GaussianRational:
    """Parse "p/q+r/si" style literals ("3", "-1/2", "i", "2-3/4i")."""
    if not isinstance(text, str):
        if isinstance(text, int):
            return QQ_I(text)
        raise InputError(f"expected a Gaussian rational string, got {text!r}")
    s = text.replace(" ", "")
    if not s:
        raise InputError("empty Gaussian rational literal")
    if not s.endswith("i"):
        return QQ_I(rational(s))
    body = s[:-1]
    split = max(body.rfind("+"), body.rfind("-"))
    if split > 0:
        re_text, im_text = body[:split], body[split:]
    else:
        re_text, im_text = "0", body
    if im_text in ("", "+"):
        im_text = "1"
    elif im_text == "-":
        im_text = "-1"
    return QQ_I(rational(re_text), rational(im_text))


def format_gauss(z: GaussianRational) -> str:
    re_text = format_rational(z.x)
    if z.y == 0:
        return re_text
    im_text = "" if abs(z.y) == 1 else format_rational(abs(z.y))
    sign = "-" if z.y < 0 else "+"
    if z.x == 0:
        return f"{'-' if z.y < 0 else ''}{im_text}i"
    return f"{re_text}{sign}{im_text}i"


def matrix(rows: Sequence[Sequence], n: Optional[int] = None, m: Optional[int] = None) -> DomainMatrix:
    rows = [[as_gauss(v) for v in row] for row in rows]
    n = len(rows) if n is None else n
    m = (len(rows[0]) if rows else 0) if m is None else m
    if n == 0 or m == 0:
        raise StructuralError("empty matrices are not represented")
    if len(rows) != n or any(len(row) != m for row in rows):
        raise StructuralError(f"matrix is not {n}x{m}")
    return DomainMatrix(rows, (n, m), QQ_I)


def zeros(n: int, m: Optional[int] = None) -> DomainMatrix:
    m = n if m is None else m
    return DomainMatrix([[ZERO] * m for _ in range(n)], (n, m), QQ_I)


def identity(n: int) -> DomainMatrix:
    return DomainMatrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], (n, n), QQ_I)


def matrix_unit(n: int, i: int, j: int) -> DomainMatrix:
    rows = [[ZERO] * n for _ in range(n)]
    rows[i][j] = ONE
    return DomainMatrix(rows, (n, n), QQ_I)


def diagonal(values: Sequence) -> DomainMatrix:
    n = len(values)
    rows = [[ZERO] * n for _ in range(n)]
    for i, v in enumerate(values):
        rows[i][i] = as_gauss(v)
    return DomainMatrix(rows, (n, n), QQ_I)


def entries(mat: DomainMatrix) -> list[list[GaussianRational]]:
    return [list(row) for row in mat.to_list()]


def adjoint(mat: DomainMatrix) -> DomainMatrix:
    rows = entries(mat)
    n, m = mat.shape
    return DomainMatrix([[conj(rows[i][j]) for i in range(n)] for j in range(m)], (m, n), QQ_I)


def scale(mat: DomainMatrix, c) -> DomainMatrix:
    c = as_gauss(c)
    rows = entries(mat)
    return DomainMatrix([[c * v for v in row] for row in rows], mat.shape, QQ_I)


def equal(a: DomainMatrix, b: DomainMatrix) -> bool:
    return a.shape == b.shape and entries(a) == entries(b)


def is_zero(mat: DomainMatrix) -> bool:
    return all(v == ZERO for row in entries(mat) for v in row)


def trace(mat: DomainMatrix) -> GaussianRational:
    rows = entries(mat)
    total = ZERO
    for i in range(mat.shape[0]):
        total += rows[i][i]
    return total


def rank(mat: DomainMatrix) -> int:
    return mat.rank()


def is_hermitian(mat: DomainMatrix) -> bool:
    return mat.shape[0] == mat.shape[1] and equal(mat, adjoint(mat))


def commutator(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    return a * b - b * a


@dataclass(frozen=True)
class Subspace:
    """Subspace of the column space ``QQ_I^dim``, basis in reduced echelon form."""

    dim: int
    rows: tuple[tuple[GaussianRational, ...], ...] = ()

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls.span(n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def span(cls, n: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = []
        for vec in vectors:
            vec = [as_gauss(v) for v in vec]
            if len(vec) != n:
                raise StructuralError(f"vector of length {len(vec)} in a space of dimension {n}")
            if any(v != ZERO for v in vec):
                rows.append(vec)
        if not rows:
            return cls.zero(n)
        reduced, pivots = DomainMatrix(rows, (len(rows), n), QQ_I).rref()
        basis = entries(reduced)[: len(pivots)]
        return cls(n, tuple(tuple(row) for row in basis))

    @classmethod
    def line(cls, vector: Sequence) -> "Subspace":
        vector = list(vector)
        space = cls.span(len(vector), [vector])
        if space.rank != 1:
            raise StructuralError("a line needs a nonzero vector")
        return space

    @classmethod
    def from_projector(cls, proj: DomainMatrix) -> "Subspace":
        return column_space(proj)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def is_zero(self) -> bool:
        return not self.rows

    @property
    def is_full(self) -> bool:
        return self.rank == self.dim

    def vectors(self) -> list[list[GaussianRational]]:
        return [list(row) for row in self.rows]

    def basis_matrix(self) -> DomainMatrix:
        return DomainMatrix(self.vectors(), (self.rank, self.dim), QQ_I)

    def _check(self, other: "Subspace") -> None:
        if other.dim != self.dim:
            raise StructuralError(f"subspaces of dimension {self.dim} and {other.dim}")

    def contains(self, vector: Sequence) -> bool:
        vector = [as_gauss(v) for v in vector]
        if all(v == ZERO for v in vector):
            return True
        return Subspace.span(self.dim, self.vectors() + [vector]).rank == self.rank

    def leq(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(row) for row in self.rows)

    def join(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.dim, self.vectors() + other.vectors())

    def perp(self) -> "Subspace":
        """Orthogonal complement for the standard Hermitian form."""
        if self.is_zero:
            return Subspace.full(self.dim)
        if self.is_full:
            return Subspace.zero(self.dim)
        conjugated = DomainMatrix([[conj(v) for v in row] for row in self.rows], (self.rank, self.dim), QQ_I)
        return Subspace.span(self.dim, entries(conjugated.nullspace()))

    def meet(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.leq(other):
            return self
        if other.leq(self):
            return other
        return self.perp().join(other.perp()).perp()

    def projector(self) -> DomainMatrix:
        """Orthogonal projection onto the subspace."""
        if self.is_zero:
            return zeros(self.dim)
        if self.is_full:
            return identity(self.dim)
        cols = self.basis_matrix().transpose()
        gram = adjoint(cols) * cols
        return cols * gram.inv() * adjoint(cols)

    def image(self, mat: DomainMatrix) -> "Subspace":
        if self.is_zero:
            return Subspace.zero(mat.shape[0])
        images = mat * self.basis_matrix().transpose()
        return column_space(images)

    def orthogonal_basis(self) -> list[list[GaussianRational]]:
        """Gram-Schmidt without normalization: pairwise orthogonal, exact."""
        out: list[list[GaussianRational]] = []
        for row in self.rows:
            vec = list(row)
            for prev in out:
                coeff = inner(prev, vec) / inner(prev, prev)
                vec = [v - coeff * p for v, p in zip(vec, prev)]
            out.append(vec)
        return out


def inner(u: Sequence[GaussianRational], v: Sequence[GaussianRational]) -> GaussianRational:
    """<u, v> = sum conj(u_i) v_i."""
    total = ZERO
    for a, b in zip(u, v):
        total += conj(a) * b
    return total


def column_space(mat: DomainMatrix) -> Subspace:
    n = mat.shape[0]
    return Subspace.span(n, entries(mat.transpose()))


def kernel(mat: DomainMatrix) -> Subspace:
    n = mat.shape[1]
    if is_zero(mat):
        return Subspace.full(n)
    if mat.rank() == n:
        return Subspace.zero(n)
    return Subspace.span(n, entries(mat.nullspace()))


def rank_one_projector(vector: Sequence[GaussianRational]) -> DomainMatrix:
    return Subspace.line(vector).projector()


def normalize_line(vector: Sequence) -> tuple[GaussianRational, ...]:
    """Scale so that the first nonzero coordinate is 1."""
    vector = [as_gauss(v) for v in vector]
    for v in vector:
        if v != ZERO:
            return tuple(w / v for w in vector)
    raise StructuralError("the zero vector does not span a line")


# Hermitian spectral tools. Everything is decided on the characteristic
# polynomial over QQ; approximations only appear in explicitly certified paths.


def charpoly(mat: DomainMatrix) -> Poly:
    if not is_hermitian(mat):
        raise StructuralError("characteristic polynomial requested for a non hermitian matrix")
    coeffs = mat.charpoly()
    real = []
    for c in coeffs:
        if c.y != 0:
            raise StructuralError("hermitian matrix with a non real characteristic coefficient")
        real.append(QQ.to_sympy(c.x))
    return Poly(real, T, domain=QQ)


def _sign_pattern(poly: Poly, strict: bool) -> bool:
    coeffs = [QQ.from_sympy(c) for c in poly.all_coeffs()]
    degree = len(coeffs) - 1
    for k, c in enumerate(coeffs):
        # coefficient of t^(degree-k) times (-1)^k must be >= 0 for a real-rooted p
        signed = c if k % 2 == 0 else -c
        if signed < 0 or (strict and signed == 0):
            return False
    return degree >= 0


def is_psd(mat: DomainMatrix) -> bool:
    if not is_hermitian(mat):
        return False
    return _sign_pattern(charpoly(mat), strict=False)


def is_pd(mat: DomainMatrix) -> bool:
    if not is_hermitian(mat):
        return False
    return _sign_pattern(charpoly(mat), strict=True)


def poly_at(poly: Poly, mat: DomainMatrix) -> DomainMatrix:
    n = mat.shape[0]
    result = zeros(n)
    for c in poly.all_coeffs():
        result = result * mat + scale(identity(n), QQ_I(QQ.from_sympy(c)))
    return result


@dataclass(frozen=True)
class SpectralFactor:
    """An irreducible factor of the characteristic polynomial and its eigenspace."""

    factor: Poly
    space: Subspace

    @property
    def is_rational(self) -> bool:
        return self.factor.degree() == 1

    @property
    def eigenvalue(self):
        coeffs = [QQ.from_sympy(c) for c in self.factor.all_coeffs()]
        return -coeffs[1] / coeffs[0]

    def roots_above(self, bound) -> int:
        count = self.factor.count_roots(QQ.to_sympy(bound), None)
        if self.factor.eval(QQ.to_sympy(bound)) == 0:
            count -= 1
        return count

    def root_count(self) -> int:
        return self.factor.degree()


def spectral_factors(mat: DomainMatrix) -> list[SpectralFactor]:
    """Eigenspaces grouped by irreducible factor of the characteristic polynomial."""
    _, factors = charpoly(mat).factor_list()
    out = []
    for factor, _ in factors:
        factor = factor.monic()
        out.append(SpectralFactor(factor, kernel(poly_at(factor, mat))))
    out.sort(key=lambda f: [QQ.from_sympy(c) for c in f.factor.all_coeffs()])
    return out


def root_intervals(poly: Poly, width) -> list[tuple]:
    """Isolating intervals (lo, hi) in QQ for the real roots, increasing."""
    out = []
    for (lo, hi), _ in poly.intervals(eps=QQ.to_sympy(width)):
        out.append((QQ.from_sympy(lo), QQ.from_sympy(hi)))
    out.sort()
    return out


def sqrt_bounds(value, width) -> tuple:
    """Rational lo <= sqrt(value) <= hi with hi - lo <= width, exact for squares."""
    value = QQ.convert(value)
    if value < 0:
        raise StructuralError("square root of a negative rational")
    num, den = value.numerator, value.denominator
    root_num, exact_num = integer_nthroot(num, 2)
    root_den, exact_den = integer_nthroot(den, 2)
    if exact_num and exact_den:
        exact = QQ(int(root_num), int(root_den))
        return exact, exact
    scale_bits = 1
    while QQ(1, 2**scale_bits) > QQ.convert(width) / 2:
        scale_bits += 1
    factor = 2**scale_bits
    # sqrt(num/den) = sqrt(num*den)/den
    floor_root, _ = integer_nthroot(num * den * factor * factor, 2)
    lo = QQ(int(floor_root), den * factor)
    hi = QQ(int(floor_root) + 1, den * factor)
    return lo, hi


def largest_eigenvalue(mat: DomainMatrix, width) -> tuple:
    """(lo, hi, exact) enclosing the largest eigenvalue of a hermitian matrix."""
    lows = []
    highs = []
    for item in spectral_factors(mat):
        if item.is_rational:
            lows.append(item.eigenvalue)
            highs.append(item.eigenvalue)
        else:
            lo, hi = root_intervals(item.factor, width)[-1]
            lows.append(lo)
            highs.append(hi)
    best_lo, best_hi = max(lows), max(highs)
    logger.debug("largest eigenvalue in [%s, %s]", best_lo, best_hi)
    return best_lo, best_hi, best_lo == best_hi
