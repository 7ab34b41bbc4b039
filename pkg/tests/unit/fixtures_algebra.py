from gelfkit import linalg, matrix_algebra
from gelfkit.matrix_algebra import BlockAlgebra, LeftIdealRep

M2 = BlockAlgebra.of(2)
C2 = BlockAlgebra.commutative(2)
M2_PLUS_C = BlockAlgebra.of(2, 1)

LINE_X = LeftIdealRep.of_line(M2, 0, [1, 0])
LINE_Y = LeftIdealRep.of_line(M2, 0, [0, 1])
LINE_DIAG = LeftIdealRep.of_line(M2, 0, [1, 1])


def m2(rows):
    return M2.element([linalg.matrix(rows)])


# eigenvalues (3 +- sqrt 5) / 2, on both sides of 1
GOLDEN = [[2, 1], [1, 1]]

SMALL_ALGEBRAS = [
    BlockAlgebra.of(1),
    BlockAlgebra.of(2),
    BlockAlgebra.of(3),
    BlockAlgebra.of(4),
    BlockAlgebra.of(2, 1),
    BlockAlgebra.of(1, 3),
    BlockAlgebra.of(2, 2),
    BlockAlgebra.of(1, 1, 2),
    BlockAlgebra.of(3, 2),
]


def random_element(alg, rng):
    return alg.element(
        [linalg.matrix([matrix_algebra.random_vector(rng, n) for _ in range(n)]) for n in alg.block_dims]
    )
