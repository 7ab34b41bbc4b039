import logging
import random
import unittest

from sympy.polys.domains import QQ

import tests.unit.fixtures_algebra as fixtures  # pylint: disable=import-error
from gelfkit import linalg, matrix_algebra
from gelfkit.error import DomainError, ModeError, StructuralError
from gelfkit.linalg import Subspace
from gelfkit.matrix_algebra import Automorphism, BlockAlgebra, IdealLattice, LeftIdealRep
from gelfkit.order import FilterRep


class TestMatrixAlgebraMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_block_algebra(self):
        self.assertEqual(fixtures.M2_PLUS_C.dimension, 5)
        self.assertTrue(fixtures.C2.is_commutative)
        self.assertEqual(len(fixtures.M2.matrix_units()), 4)
        with self.assertRaises(StructuralError):
            BlockAlgebra(())
        with self.assertRaises(StructuralError):
            BlockAlgebra.of(0)
        with self.assertRaises(StructuralError):
            fixtures.M2.embed(0, linalg.identity(3))

    def test_element_arithmetic(self):
        e01 = fixtures.M2.unit(0, 0, 1)
        e10 = fixtures.M2.unit(0, 1, 0)
        self.assertEqual(e01 * e10, fixtures.M2.unit(0, 0, 0))
        self.assertEqual(e01.adjoint(), e10)
        self.assertTrue((e01 - e01).is_zero())
        self.assertTrue(matrix_algebra.is_projection(fixtures.M2.block_unit(0)))

    def test_ideal_lattice_operations(self):
        x, y = fixtures.LINE_X, fixtures.LINE_Y
        self.assertTrue(matrix_algebra.ideal_meet(x, y).is_zero)
        self.assertTrue(matrix_algebra.ideal_join(x, y).is_full)
        self.assertTrue(matrix_algebra.ideal_leq(x, LeftIdealRep.full(fixtures.M2)))
        self.assertFalse(matrix_algebra.ideal_leq(x, y))
        self.assertEqual(x.dimension, 2)
        self.assertEqual(x.block_support(), frozenset({0}))

    def test_ideal_contains(self):
        x = fixtures.LINE_X
        self.assertTrue(x.contains(fixtures.M2.unit(0, 1, 0)))
        self.assertFalse(x.contains(fixtures.M2.unit(0, 0, 1)))
        self.assertEqual(len(x.spanning_set()), 2)

    def test_commutant(self):
        x = fixtures.LINE_X
        self.assertEqual(matrix_algebra.commutant(x), fixtures.LINE_Y)
        self.assertEqual(matrix_algebra.commutant_by_solve(x), matrix_algebra.commutant(x))
        diag = fixtures.LINE_DIAG
        self.assertEqual(matrix_algebra.commutant_by_solve(diag), matrix_algebra.commutant(diag))

    def test_hereditary_correspondence(self):
        x = fixtures.LINE_X
        corner = matrix_algebra.hereditary_of_ideal(x)
        self.assertEqual(corner.dimension, 1)
        self.assertTrue(corner.is_commutative)
        self.assertEqual(matrix_algebra.ideal_of_hereditary(corner), x)
        self.assertEqual(matrix_algebra.ideal_of_hereditary(fixtures.m2([[1, 0], [0, 0]])), x)
        with self.assertRaises(StructuralError):
            matrix_algebra.ideal_of_hereditary(fixtures.m2([[2, 0], [0, 0]]))

    def test_filter_bicommutant(self):
        lattice = IdealLattice(fixtures.M2, [fixtures.LINE_X, fixtures.LINE_Y])
        self.assertEqual(len(lattice), 4)
        i = lattice.index(fixtures.LINE_X)
        top = lattice.index(LeftIdealRep.full(fixtures.M2))
        self.assertEqual(matrix_algebra.filter_bicommutant(lattice, FilterRep.of([i, top])), fixtures.LINE_Y)
        self.assertTrue(matrix_algebra.filter_bicommutant(lattice, FilterRep.of([top])).is_zero)
        with self.assertRaises(StructuralError):
            matrix_algebra.filter_bicommutant(lattice, FilterRep.of([i]))

    def test_filter_bicommutant_top_only(self):
        m1 = BlockAlgebra.of(1)
        lattice = IdealLattice(m1)
        self.assertEqual(len(lattice), 2)
        top = lattice.index(LeftIdealRep.full(m1))
        result = matrix_algebra.filter_bicommutant(lattice, FilterRep.of([top]))
        self.assertIsInstance(result, LeftIdealRep)
        self.assertEqual(result, LeftIdealRep.zero(m1))

    def test_primitive_ideal(self):
        alg = fixtures.M2_PLUS_C
        p = matrix_algebra.primitive_ideal(alg, 1)
        self.assertEqual(p.block_support(), frozenset({0}))
        self.assertEqual(matrix_algebra.hull(matrix_algebra.hereditary_of_ideal(p)), frozenset({1}))
        self.assertFalse(matrix_algebra.is_connected(alg))

    def test_center(self):
        report = matrix_algebra.center(fixtures.M2_PLUS_C)
        self.assertEqual(report.dimension, 2)
        self.assertEqual(report.to_json(), {"dimension": 2, "central_projections": 2})

    def test_f_eps(self):
        a = fixtures.m2([["1/2", 0], [0, 2]])
        self.assertEqual(matrix_algebra.f_eps(a, 1), fixtures.m2([[0, 0], [0, 1]]))
        with self.assertRaises(DomainError):
            matrix_algebra.f_eps(a, 0)
        with self.assertRaises(DomainError):
            matrix_algebra.f_eps(fixtures.m2([[-1, 0], [0, 1]]), 1)

    def test_f_eps_irrational(self):
        a = fixtures.m2(fixtures.GOLDEN)
        with self.assertRaises(ModeError):
            matrix_algebra.f_eps(a, 1)
        cert = matrix_algebra.f_eps_certified(a, 1, QQ(1, 100))
        self.assertFalse(cert.exact)
        self.assertTrue(cert.error <= QQ(1, 100))
        # every eigenvalue of a lies above 1/10
        self.assertEqual(matrix_algebra.f_eps(a, QQ(1, 10)), a - fixtures.M2.one().scale(QQ(1, 10)))

    def test_pedersen_k0_member(self):
        a = fixtures.m2([["1/2", 0], [0, 0]])
        witness = matrix_algebra.pedersen_k0_member(a)
        self.assertTrue(witness.member)
        self.assertEqual(witness.verified, matrix_algebra.EXACT)
        self.assertEqual(witness.b, fixtures.m2([["3/2", 0], [0, 0]]))

    def test_four_decomposition(self):
        a = fixtures.M2.unit(0, 0, 1)
        parts = matrix_algebra.four_decomposition(a)
        self.assertEqual(len(parts), 4)
        for part in parts:
            self.assertTrue(matrix_algebra.is_positive(part))
        self.assertTrue((parts[0] * parts[1]).is_zero())
        self.assertTrue((parts[2] * parts[3]).is_zero())

    def test_op_norm(self):
        norm = matrix_algebra.op_norm(fixtures.M2.unit(0, 0, 1))
        self.assertTrue(norm.exact)
        self.assertEqual(norm.lo, QQ(1))
        self.assertEqual(matrix_algebra.op_norm(fixtures.m2([[2, 0], [0, "i"]])).hi, QQ(2))
        with self.assertRaises(DomainError):
            matrix_algebra.op_norm(fixtures.M2.one(), 0)

    def test_op_norm_irrational(self):
        norm = matrix_algebra.op_norm(fixtures.m2(fixtures.GOLDEN), QQ(1, 1000))
        self.assertTrue(norm.width <= QQ(1, 1000))
        self.assertTrue(norm.lo <= QQ(2619, 1000))
        self.assertTrue(norm.hi >= QQ(2618, 1000))

    def test_strict_seminorm(self):
        value = matrix_algebra.strict_seminorm(fixtures.M2.unit(0, 0, 0), fixtures.M2.unit(0, 0, 1))
        self.assertEqual((value.lo, value.hi), (QQ(1), QQ(1)))

    def test_automorphism(self):
        swap = Automorphism.block_permutation(fixtures.C2, [1, 0])
        self.assertEqual(swap.apply(fixtures.C2.block_unit(0)), fixtures.C2.block_unit(1))
        self.assertTrue(swap.compose(swap).is_identity())
        self.assertTrue(swap.inverse().same_action(swap))
        with self.assertRaises(StructuralError):
            Automorphism.block_permutation(fixtures.M2_PLUS_C, [1, 0])
        with self.assertRaises(StructuralError):
            Automorphism.inner(fixtures.m2([[1, 1], [0, 1]]))

    def test_aut_uniform_distance(self):
        alpha = Automorphism.inner(fixtures.m2([[1, 0], [0, -1]]))
        report = matrix_algebra.aut_uniform_distance(alpha)
        self.assertEqual((report.enclosure.lo, report.enclosure.hi), (QQ(2), QQ(2)))
        self.assertTrue(report.attained)
        self.assertEqual(report.witness, "e01@0")
        ident = matrix_algebra.aut_uniform_distance(Automorphism.identity(fixtures.M2))
        self.assertEqual(ident.enclosure.hi, QQ(0))

    def test_abelian_element(self):
        rank_one = fixtures.m2([[1, 0], [0, 0]])
        self.assertTrue(matrix_algebra.is_abelian_element(rank_one))
        self.assertTrue(matrix_algebra.corner_is_commutative(rank_one))
        self.assertFalse(matrix_algebra.is_abelian_element(fixtures.M2.one()))
        self.assertFalse(matrix_algebra.corner_is_commutative(fixtures.M2.one()))

    def test_pythagorean_rotation(self):
        rot = matrix_algebra.pythagorean_rotation(2)
        self.assertTrue(linalg.equal(rot * linalg.adjoint(rot), linalg.identity(2)))
        with self.assertRaises(StructuralError):
            matrix_algebra.pythagorean_rotation(2, triple=(1, 2, 3))

    def test_samples_are_deterministic(self):
        first = matrix_algebra.minimal_ideals_sample(fixtures.M2, 3, seed=5)
        self.assertEqual(first, matrix_algebra.minimal_ideals_sample(fixtures.M2, 3, seed=5))
        for ideal in first:
            self.assertEqual(ideal.dimension, 2)

    def test_spectral_projection(self):
        a = fixtures.m2([[1, 0], [0, 3]])
        self.assertEqual(matrix_algebra.spectral_projection(a, 0, 3), fixtures.m2([[0, 0], [0, 1]]))
        self.assertEqual(
            matrix_algebra.support_projection(fixtures.m2([[1, 1], [1, 1]])),
            fixtures.M2.element([Subspace.line([1, 1]).projector()]),
        )

    def test_hereditary_round_trip_random(self):
        rng = random.Random(7)
        for _ in range(200):
            alg = rng.choice(fixtures.SMALL_ALGEBRAS)
            ideal = matrix_algebra.random_ideal(alg, rng)
            corner = matrix_algebra.hereditary_of_ideal(ideal)
            self.assertEqual(matrix_algebra.ideal_of_hereditary(corner.projection()), ideal)
            self.assertEqual(matrix_algebra.hereditary_of_ideal(matrix_algebra.ideal_of_hereditary(corner)), corner)
            for a in ideal.spanning_set():
                self.assertTrue(corner.contains(a.adjoint() * a))
            a = fixtures.random_element(alg, rng)
            self.assertEqual(ideal.contains(a), corner.contains(a.adjoint() * a))

    def test_commutant_laws_random(self):
        rng = random.Random(11)
        for _ in range(200):
            alg = rng.choice(fixtures.SMALL_ALGEBRAS)
            big = matrix_algebra.random_ideal(alg, rng)
            other = matrix_algebra.random_ideal(alg, rng)
            small = matrix_algebra.ideal_meet(big, other)
            perp = matrix_algebra.commutant(big)
            self.assertEqual(perp, matrix_algebra.commutant_by_solve(big))
            self.assertTrue(matrix_algebra.ideal_leq(big, matrix_algebra.commutant(perp)))
            self.assertTrue(matrix_algebra.ideal_leq(perp, matrix_algebra.commutant(small)))
            self.assertEqual(
                matrix_algebra.commutant(matrix_algebra.ideal_join(big, other)),
                matrix_algebra.ideal_meet(perp, matrix_algebra.commutant(other)),
            )

    def test_commutant_laws_line_lattice(self):
        lattice = IdealLattice(fixtures.M2, [fixtures.LINE_X, fixtures.LINE_Y, fixtures.LINE_DIAG])
        self.assertEqual(len(lattice), 5)
        for a in lattice.ideals:
            self.assertEqual(matrix_algebra.commutant(a), matrix_algebra.commutant_by_solve(a))
            self.assertEqual(matrix_algebra.commutant(matrix_algebra.commutant(a)), a)
            for b in lattice.ideals:
                if matrix_algebra.ideal_leq(a, b):
                    self.assertTrue(
                        matrix_algebra.ideal_leq(matrix_algebra.commutant(b), matrix_algebra.commutant(a))
                    )

    def test_f_eps_random(self):
        rng = random.Random(3)
        for _ in range(100):
            alg = rng.choice(fixtures.SMALL_ALGEBRAS)
            a = matrix_algebra.random_positive(alg, rng)
            eps = QQ(rng.randint(1, 4), rng.randint(1, 3))
            delta = QQ(rng.randint(1, 4), rng.randint(1, 3))
            cut = matrix_algebra.f_eps(a, eps)
            self.assertTrue(matrix_algebra.is_positive(cut))
            self.assertEqual(cut * a, a * cut)
            tol = QQ(1, 100)
            norm = matrix_algebra.op_norm(a - cut, tol)
            self.assertTrue(norm.lo <= eps)
            self.assertTrue(norm.hi <= eps + tol)
            self.assertEqual(matrix_algebra.f_eps(matrix_algebra.f_eps(a, delta), eps), matrix_algebra.f_eps(a, eps + delta))


if __name__ == "__main__":
    unittest.main()
