import logging
import random
import unittest

from sympy.polys.domains import QQ

import tests.unit.fixtures_algebra as fixtures  # pylint: disable=import-error
from gelfkit import blowup, linalg, matrix_algebra
from gelfkit.blowup import BlowingUp
from gelfkit.error import DomainError, StructuralError
from gelfkit.finite_space import FiniteSpace
from gelfkit.gelfand_space import UltrafilterPoint
from gelfkit.linalg import Subspace
from gelfkit.matrix_algebra import HereditaryCorner

ALG = fixtures.M2_PLUS_C


def two_points():
    return BlowingUp(ALG, FiniteSpace.discrete(["x", "y"]), (0, 1))


def three_points():
    return BlowingUp(ALG, FiniteSpace.discrete(["x", "y", "z"]), (0, 1))


class TestBlowupMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_blowing_up(self):
        b = two_points()
        self.assertTrue(b.density_holds())
        self.assertTrue(b.is_central())
        self.assertEqual(b.unreachable_points(), [])
        self.assertEqual(three_points().unreachable_points(), [2])
        self.assertEqual(b.blocks_over(0b10), frozenset({1}))

    def test_blowing_up_invalid(self):
        with self.assertRaises(DomainError):
            BlowingUp(ALG, FiniteSpace.sierpinski(), (0, 1))
        with self.assertRaises(StructuralError):
            BlowingUp(ALG, FiniteSpace.discrete(["x", "y"]), (0,))
        with self.assertRaises(StructuralError):
            BlowingUp(ALG, FiniteSpace.discrete(["x", "y"]), (0, 5))

    def test_embed(self):
        b = two_points()
        f = b.embed([2, 3])
        self.assertEqual(f, ALG.element([linalg.diagonal([2, 2]), linalg.matrix([[3]])]))
        self.assertEqual(b.indicator(0b11), ALG.one())
        with self.assertRaises(StructuralError):
            b.embed([1])

    def test_u_subalgebra(self):
        b = two_points()
        sub = blowup.u_subalgebra(b, 0b01)
        self.assertEqual(sub.blocks, frozenset({0}))
        self.assertEqual(len(sub.spanning_set()), 4)
        self.assertTrue(sub.contains_left(ALG.unit(0, 0, 1)))
        self.assertFalse(sub.contains_right(ALG.unit(1, 0, 0)))
        self.assertTrue(sub.contains_corner(ALG.unit(0, 1, 1)))

    def test_vanishes_off(self):
        b = two_points()
        self.assertTrue(blowup.vanishes_off(b, 0b01, ALG.unit(0, 0, 1)))
        self.assertFalse(blowup.vanishes_off(b, 0b01, ALG.unit(1, 0, 0)))

    def test_products_vanish(self):
        b = two_points()
        self.assertTrue(blowup.products_vanish(b, 0b01, 0b10))
        self.assertFalse(blowup.products_vanish(b, 0b01, 0b01))

    def test_support(self):
        b = two_points()
        self.assertEqual(blowup.support(b, ALG.unit(0, 0, 1)), 0b01)
        self.assertEqual(blowup.support(b, ALG.one()), 0b11)

    def test_approx_compact(self):
        b = two_points()
        approx = blowup.approx_compact(b, ALG.unit(0, 0, 1), QQ(1, 10))
        self.assertTrue(approx.holds)
        self.assertEqual(approx.f, b.indicator(0b01))
        self.assertEqual(
            approx.to_json(),
            {"support": [0], "differences": [{"lo": "0", "hi": "0"}] * 3, "holds": True},
        )
        with self.assertRaises(DomainError):
            blowup.approx_compact(b, ALG.one(), 0)

    def test_gelfand_to_base(self):
        b = two_points()
        self.assertEqual(blowup.gelfand_to_base(b, UltrafilterPoint.point(ALG, 1)), 1)
        self.assertEqual(blowup.gelfand_to_base(b, UltrafilterPoint.of(ALG, 0, [1, 1])), 0)

    def test_blowup_factorization(self):
        sample = [UltrafilterPoint.of(ALG, 0, [1, "i"]), UltrafilterPoint.point(ALG, 1)]
        report = blowup.blowup_factorization(three_points(), sample)
        self.assertTrue(report.commutes)
        self.assertEqual(report.to_json(), {"commutes": True, "checked": 2, "unreachable_points": [2], "mismatches": []})

    def test_hausdorff_spectrum_separates(self):
        self.assertTrue(blowup.hausdorff_spectrum_separates(ALG.one(), ALG.one()))
        self.assertFalse(blowup.hausdorff_spectrum_separates(ALG.one(), ALG.zero()))
        a = ALG.unit(0, 0, 1) + ALG.unit(1, 0, 0)
        b = ALG.embed(0, linalg.matrix([[0, 1], [0, 0]])) + ALG.block_unit(1)
        self.assertTrue(blowup.hausdorff_spectrum_separates(a, b))
        self.assertFalse(blowup.hausdorff_spectrum_separates(a, a + ALG.unit(0, 1, 0).scale(linalg.I_UNIT)))
        with self.assertRaises(StructuralError):
            blowup.hausdorff_spectrum_separates(ALG.one(), fixtures.M2.one())

    def test_gelfand_etale_bijection(self):
        sample = [UltrafilterPoint.of(ALG, 0, [1, 0]), UltrafilterPoint.of(ALG, 0, [1, 1]), UltrafilterPoint.point(ALG, 1)]
        result = blowup.gelfand_etale_bijection(two_points(), sample)
        self.assertTrue(result.bijective)
        self.assertEqual(result.germs, 3)
        self.assertEqual(result.mismatches, [])
        again = blowup.gelfand_etale_bijection(two_points(), sample + sample[:1])
        self.assertTrue(again.bijective)
        self.assertEqual(again.germs, 3)

    def test_gelfand_etale_bijection_missing_corner(self):
        b = two_points()
        xi, eta = UltrafilterPoint.of(ALG, 0, [1, 0]), UltrafilterPoint.point(ALG, 1)
        corners = [matrix_algebra.hereditary_of_ideal(xi.generator())]
        result = blowup.gelfand_etale_bijection(b, [xi, eta], corners)
        self.assertFalse(result.surjective)
        self.assertFalse(result.bijective)
        self.assertEqual(len(result.mismatches), 1)

    def test_gelfand_etale_bijection_repeated_corner(self):
        b = two_points()
        xi = UltrafilterPoint.of(ALG, 0, [1, "i"])
        corner = matrix_algebra.hereditary_of_ideal(xi.generator())
        result = blowup.gelfand_etale_bijection(b, [xi], [corner, corner])
        self.assertFalse(result.injective)
        self.assertTrue(result.surjective)

    def test_gelfand_etale_bijection_non_minimal_germ(self):
        one_point = BlowingUp(ALG, FiniteSpace.discrete(["x"]), (0, 0))
        xi, eta = UltrafilterPoint.of(ALG, 0, [0, 1]), UltrafilterPoint.point(ALG, 1)
        both = HereditaryCorner(ALG, (Subspace.line([0, 1]), Subspace.full(1)))
        result = blowup.gelfand_etale_bijection(one_point, [xi, eta], [both])
        self.assertFalse(result.minimal)
        self.assertFalse(result.surjective)
        split = blowup.gelfand_etale_bijection(two_points(), [xi, eta], [both])
        self.assertTrue(split.bijective)
        self.assertEqual(split.germs, 2)

    def test_corner_presheaf(self):
        b = two_points()
        xi = UltrafilterPoint.of(ALG, 0, [1, 0])
        p = blowup.corner_presheaf(b, [matrix_algebra.hereditary_of_ideal(xi.generator())])
        self.assertEqual(p.group(0b11).orders, (2,))
        self.assertEqual(p.group(0b10).orders, ())
        with self.assertRaises(StructuralError):
            blowup.corner_presheaf(b, [HereditaryCorner(ALG, (Subspace.full(2), Subspace.zero(1)))])

    def test_u_subalgebras_over_discrete_spaces(self):
        for n in range(1, 5):
            alg = matrix_algebra.BlockAlgebra.of(2, *([1] * (n - 1)))
            b = BlowingUp(alg, FiniteSpace.discrete([f"p{i}" for i in range(n)]), tuple(range(n)))
            subs = {u: blowup.u_subalgebra(b, u) for u in b.space.opens}
            for u, sub in subs.items():
                self.assertEqual(sub.blocks, frozenset(x for x in range(n) if u >> x & 1))
                for e in alg.matrix_units():
                    self.assertEqual(sub.contains_left(e), blowup.vanishes_off(b, u, e))
                for a in sub.spanning_set():
                    self.assertTrue(blowup.vanishes_off(b, u, a))
                    self.assertTrue(sub.contains_corner(a))
                for v, other in subs.items():
                    self.assertEqual(blowup.products_vanish(b, u, v), u & v == 0)
                    if u & ~v == 0:
                        self.assertTrue(sub.blocks <= other.blocks)
                        self.assertTrue(matrix_algebra.ideal_leq(sub.left, other.left))

    def test_support_monotone(self):
        alg = matrix_algebra.BlockAlgebra.of(2, 1, 1)
        b = BlowingUp(alg, FiniteSpace.discrete(["x", "y", "z"]), (0, 1, 2))
        rng = random.Random(13)
        for _ in range(100):
            a = matrix_algebra.random_positive(alg, rng)
            c = matrix_algebra.random_positive(alg, rng)
            self.assertEqual(blowup.support(b, a) & ~blowup.support(b, a + c), 0)
            mask = rng.randrange(8)
            self.assertEqual(blowup.support(b, b.indicator(mask) * a) & ~(blowup.support(b, a) & mask), 0)
            self.assertEqual(blowup.support(b, a * c) & ~(blowup.support(b, a) & blowup.support(b, c)), 0)


if __name__ == "__main__":
    unittest.main()
