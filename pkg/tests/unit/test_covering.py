import logging
import unittest

import tests.unit.fixtures_covering as fixtures  # pylint: disable=import-error
from gelfkit import covering
from gelfkit.abelian import FgAbGroup
from gelfkit.cech import AbstractCover, cech_cohomology, cellular_cohomology
from gelfkit.covering import (
    CoveringQuadruple,
    GraphMap,
    NonunitalCoveringData,
    TwoComplex,
)
from gelfkit.error import DomainError, ResourceError, StructuralError
from gelfkit.gelfand_space import MorphismData, sample_points
from gelfkit.linalg import Subspace
from gelfkit.matrix_algebra import Automorphism, BlockAlgebra, HereditaryCorner

Z = FgAbGroup.free(1)


def line_corner(alg, block, vector):
    return HereditaryCorner(
        alg, tuple(Subspace.line(vector) if x == block else Subspace.zero(n) for x, n in enumerate(alg.block_dims))
    )


def wedge_of_circles():
    return TwoComplex.make(["v"], [["v", "v"], ["v", "v"]])


def torus():
    return TwoComplex.make(["v"], [["v", "v"], ["v", "v"]], [["e1", "e2", "e1~", "e2~"]])


def klein_bottle():
    return TwoComplex.make(["v"], [["v", "v"], ["v", "v"]], [["e1", "e2", "e1", "e2~"]])


class TestCoveringQuadrupleMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_generate_group(self):
        group = covering.generate_group(fixtures.M2M2, [fixtures.SWAP])
        self.assertEqual(len(group), 2)
        self.assertTrue(group[0].same_action(Automorphism.identity(fixtures.M2M2)))
        self.assertEqual(len(covering.generate_group(fixtures.M2M2, [fixtures.SWAP, fixtures.SIGN])), 4)

    def test_generate_group_limit(self):
        with self.assertRaises(ResourceError) as ctx:
            covering.generate_group(fixtures.M2M2, [fixtures.SWAP], limit=1)
        self.assertTrue(ctx.exception.truncated)
        self.assertEqual(len(ctx.exception.partial), 1)

    def test_generate_group_foreign_generator(self):
        with self.assertRaises(StructuralError):
            covering.generate_group(fixtures.M2M2, [Automorphism.identity(fixtures.M2)])

    def test_quadruple_shape(self):
        q = fixtures.swap_quadruple()
        self.assertEqual(q.to_json()["group_order"], 2)
        unit = fixtures.M2.unit(0, 0, 1)
        self.assertEqual(q.lifted(unit), fixtures.M2M2.unit(0, 0, 1) + fixtures.M2M2.unit(1, 0, 1))

    def test_quadruple_rejects_duplicates(self):
        identity = Automorphism.identity(fixtures.M2M2)
        with self.assertRaises(StructuralError):
            CoveringQuadruple(fixtures.M2, fixtures.M2M2, (identity, identity), fixtures.DIAGONAL)

    def test_quadruple_rejects_mismatched_lift(self):
        corner = MorphismData.from_multiplicities(BlockAlgebra.of(1), fixtures.M2, [[1]])
        with self.assertRaises(StructuralError):
            CoveringQuadruple(fixtures.M2, fixtures.M2M2, (Automorphism.identity(fixtures.M2M2),), corner)

    def test_precovering_swap(self):
        report = covering.check_precovering(fixtures.swap_quadruple())
        self.assertTrue(report.ok)
        self.assertFalse(report.total_connected)
        self.assertTrue(report.base_connected)
        self.assertEqual(report.failures, [])
        self.assertTrue(report.to_json()["precovering"])
        self.assertEqual(covering.fixed_point_space(fixtures.swap_quadruple()).rank, 4)

    def test_precovering_non_unital(self):
        corner = MorphismData.from_multiplicities(BlockAlgebra.of(1), fixtures.M2, [[1]])
        report = covering.check_precovering(CoveringQuadruple.make(corner, []))
        self.assertFalse(report.unital)
        self.assertFalse(report.ok)
        self.assertIn("lift(1) is not the unit of the total algebra", report.failures)

    def test_precovering_trivial_group(self):
        identity = MorphismData.from_multiplicities(fixtures.M2, fixtures.M2, [[1]])
        q = CoveringQuadruple.make(identity, [])
        self.assertEqual(len(q.group), 1)
        self.assertTrue(covering.check_precovering(q).ok)

    def test_precovering_moving_group(self):
        report = covering.check_precovering(CoveringQuadruple.make(fixtures.DIAGONAL, [fixtures.SIGN]))
        self.assertFalse(report.stabilizer)
        self.assertFalse(report.fixed_points)
        self.assertIn("group element 1 moves the lifted algebra", report.failures)

    def test_precovering_family_outside_group(self):
        report = covering.check_precovering(CoveringQuadruple.make(fixtures.DIAGONAL, [], [fixtures.SWAP]))
        self.assertFalse(report.stabilizer)
        self.assertIn("family automorphism 0 fixes the lifted algebra but is not in the group", report.failures)

    def test_evenly_covered(self):
        report = covering.check_evenly_covered(fixtures.swap_quadruple(), line_corner(fixtures.M2, 0, [1, 0]))
        self.assertTrue(report.ok)
        self.assertEqual(report.candidates, 2)
        self.assertEqual([w.copy for w in report.witnesses], [0, 1])
        out = report.to_json()
        self.assertTrue(out["evenly_covered"])
        self.assertNotIn("rejected", out)

    def test_evenly_covered_gaussian_line(self):
        report = covering.check_evenly_covered(fixtures.swap_quadruple(), line_corner(fixtures.M2, 0, [1, "i"]))
        self.assertTrue(report.ok)
        self.assertEqual(len(report.witnesses), 2)

    def test_evenly_covered_sampled_points(self):
        q = fixtures.swap_quadruple()
        for xi in sample_points(fixtures.M2, 10, seed=9):
            report = covering.check_evenly_covered(q, covering.point_corner(xi))
            self.assertTrue(report.ok)
            self.assertEqual(len(report.witnesses), 2)

    def test_evenly_covered_rejections(self):
        q = fixtures.swap_quadruple()
        whole = HereditaryCorner(fixtures.M2, (Subspace.full(2),))
        self.assertEqual(covering.check_evenly_covered(q, whole).rejected, "corner is the whole algebra")
        empty = HereditaryCorner(fixtures.M2, (Subspace.zero(2),))
        report = covering.check_evenly_covered(q, empty)
        self.assertFalse(report.ok)
        self.assertEqual(report.rejected, "corner is not connected")
        with self.assertRaises(StructuralError):
            covering.check_evenly_covered(q, line_corner(fixtures.M2M2, 0, [1, 0]))

    def test_not_evenly_covered_without_group(self):
        q = CoveringQuadruple.make(fixtures.DIAGONAL, [])
        report = covering.check_evenly_covered(q, line_corner(fixtures.M2, 0, [1, 0]))
        self.assertFalse(report.ok)
        self.assertEqual(report.candidates, 2)

    def test_unital_covering(self):
        report = covering.check_unital_covering(fixtures.swap_quadruple(), sample_points(fixtures.M2, 10))
        self.assertTrue(report.ok)
        self.assertEqual(report.checked, 10)
        self.assertEqual(report.to_json()["unsatisfied"], [])

    def test_unital_covering_skipped(self):
        corner = MorphismData.from_multiplicities(BlockAlgebra.of(1), fixtures.M2, [[1]])
        report = covering.check_unital_covering(CoveringQuadruple.make(corner, []), sample_points(BlockAlgebra.of(1), 3))
        self.assertFalse(report.ok)
        self.assertEqual(report.checked, 0)

    def test_nonunital_whole_ideal(self):
        data = NonunitalCoveringData(fixtures.swap_quadruple(), (0,), (0, 1), fixtures.DIAGONAL)
        report = covering.check_covering_nonunital(data)
        self.assertTrue(report.ok)
        self.assertEqual(report.to_json()["failures"], [])

    def test_nonunital_proper_ideal(self):
        lift = MorphismData.from_multiplicities(fixtures.M2, fixtures.M2, [[1]])
        data = NonunitalCoveringData(fixtures.swap_quadruple(), (0,), (0,), lift)
        report = covering.check_covering_nonunital(data)
        self.assertFalse(report.ok)
        self.assertTrue(report.essential_base)
        self.assertFalse(report.essential_total)
        self.assertFalse(report.restriction)
        self.assertFalse(report.action_restricts)
        self.assertIn("total ideal has a nonzero annihilator", report.failures)

    def test_nonunital_invalid_blocks(self):
        with self.assertRaises(StructuralError):
            NonunitalCoveringData(fixtures.swap_quadruple(), (0,), (1, 0), fixtures.DIAGONAL)
        with self.assertRaises(StructuralError):
            NonunitalCoveringData(fixtures.swap_quadruple(), (0,), (0,), fixtures.DIAGONAL)

    def test_annihilator_dimension(self):
        self.assertEqual(covering.annihilator_dimension(fixtures.M2M2, (0,)), 4)
        self.assertEqual(covering.annihilator_dimension(fixtures.M2M2, (0, 1)), 0)


class TestPresentationMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_reduce(self):
        self.assertEqual(covering.free_reduce([(0, 1), (0, -1), (1, 1)]), [(1, 1)])
        self.assertEqual(covering.cyclic_reduce([(0, 1), (1, 1), (0, -1)]), [(1, 1)])
        self.assertEqual(covering.cyclic_reduce([(0, 1), (1, 1), (0, -1), (1, -1)]), [(0, 1), (1, 1), (0, -1), (1, -1)])

    def test_parse_letter(self):
        self.assertEqual(covering._parse_letter("e2~", 2), (1, -1))  # pylint: disable=protected-access
        with self.assertRaises(StructuralError):
            covering._parse_letter("e3", 2)  # pylint: disable=protected-access
        with self.assertRaises(StructuralError):
            covering._parse_letter("x1", 2)  # pylint: disable=protected-access

    def test_complex_validation(self):
        with self.assertRaises(StructuralError):
            TwoComplex.make(["a", "b"], [["a", "b"]], [["e1"]])
        with self.assertRaises(StructuralError):
            TwoComplex.make(["a"], [["a", "c"]])
        with self.assertRaises(StructuralError):
            TwoComplex.make(["a", "a"], [])

    def test_wedge(self):
        p = covering.pi1_presentation(wedge_of_circles())
        self.assertTrue(p.is_free)
        self.assertEqual(p.generators, ("e1", "e2"))
        self.assertEqual(p.abelianization(), FgAbGroup.free(2))

    def test_wedges_of_triangles(self):
        for k in range(1, 6):
            vertices = ["0"] + [f"{t}{i}" for i in range(k) for t in "ab"]
            edges = []
            for i in range(k):
                edges += [["0", f"a{i}"], [f"a{i}", f"b{i}"], [f"b{i}", "0"]]
            p = covering.pi1_presentation(TwoComplex.make(vertices, edges))
            self.assertTrue(p.is_free)
            self.assertEqual(len(p.generators), k)
            self.assertEqual(p.abelianization(), FgAbGroup.free(k))
            faces = []
            for i in range(k):
                faces += [[0, 2 * i + 1], [2 * i + 1, 2 * i + 2], [2 * i + 2, 0]]
            self.assertEqual(cech_cohomology(AbstractCover.make(2 * k + 1, faces)), [Z, FgAbGroup.free(k)])

    def test_torus(self):
        x = torus()
        self.assertEqual(x.euler_characteristic(), 0)
        p = covering.pi1_presentation(x)
        self.assertEqual(p.relator_strings(), ["e1 e2 e1~ e2~"])
        self.assertEqual(p.relation_matrix(), [[0, 0]])
        self.assertEqual(p.abelianization(), FgAbGroup.free(2))
        self.assertEqual(cellular_cohomology(x), [Z, FgAbGroup.free(2), Z])

    def test_klein_bottle(self):
        p = covering.pi1_presentation(klein_bottle())
        self.assertEqual(p.abelianization(), FgAbGroup(1, (2,)))
        self.assertEqual(p.to_json()["abelianization"], {"rank": 1, "torsion": [2]})
        self.assertEqual(cellular_cohomology(klein_bottle()), [Z, Z, FgAbGroup.cyclic(2)])

    def test_triangle_tree(self):
        x = TwoComplex.make(["a", "b", "c"], [["a", "b"], ["b", "c"], ["c", "a"]])
        self.assertEqual(len(covering.spanning_tree_edges(x)), 2)
        p = covering.pi1_presentation(x)
        self.assertEqual(len(p.generators), 1)
        self.assertEqual(p.abelianization(), Z)

    def test_filled_triangle(self):
        x = TwoComplex.make(["a", "b", "c"], [["a", "b"], ["b", "c"], ["c", "a"]], [["e1", "e2", "e3"]])
        self.assertEqual(covering.pi1_presentation(x).abelianization(), FgAbGroup.trivial())
        self.assertEqual(x.to_json()["cells"], [["e1", "e2", "e3"]])

    def test_disconnected(self):
        with self.assertRaises(DomainError):
            covering.pi1_presentation(TwoComplex.make(["a", "b"], []))
        with self.assertRaises(StructuralError):
            covering.pi1_presentation(torus(), base=3)


class TestGraphCoveringMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_graph_map_validation(self):
        with self.assertRaises(StructuralError):
            GraphMap.make([[0, 1]], [[0, 1]], {0: 0})
        with self.assertRaises(StructuralError):
            GraphMap.make([[0, 1]], [[0, 1]], {0: 0, 1: 0})
        with self.assertRaises(StructuralError):
            GraphMap.make([[0, 1]], [[0, 1]], {0: 0, 1: 7})

    def test_hexagon_over_triangle(self):
        p = fixtures.cycle_over_triangle(6)
        self.assertEqual(p.fiber(1), [1, 4])
        report = covering.graph_covering_check(p)
        self.assertTrue(report.is_covering)
        self.assertEqual(report.fiber_size, 2)
        self.assertEqual(report.deck_order, 2)
        self.assertTrue(report.is_regular)
        out = report.to_json()
        self.assertTrue(out["regular"])
        self.assertIn({str(i): str((i + 3) % 6) for i in range(6)}, out["deck_group"])

    def test_folded_edge(self):
        p = GraphMap.make([["a", "b"], ["b", "c"]], [["x", "y"]], {"a": "x", "b": "y", "c": "x"})
        report = covering.graph_covering_check(p)
        self.assertFalse(report.is_covering)
        self.assertEqual(report.witness, "b")
        self.assertEqual(report.reason, "star is folded")
        self.assertEqual(report.to_json(), {"covering": False, "witness": "b", "reason": "star is folded"})

    def test_empty_fiber(self):
        p = GraphMap.make([["a", "b"]], [["x", "y"]], {"a": "x", "b": "y"}, base_vertices=["z"])
        report = covering.graph_covering_check(p)
        self.assertEqual(report.witness, "z")
        self.assertEqual(report.reason, "base vertex has an empty fiber")

    def test_factorization(self):
        p12 = fixtures.cycle_over_triangle(12)
        p6 = fixtures.cycle_over_triangle(6)
        self.assertEqual(covering.covering_factorization(p12, p6), {i: i % 6 for i in range(12)})
        self.assertIsNone(covering.covering_factorization(p6, p12))

    def test_incomparable_wedge_covers(self):
        first, second = fixtures.wedge_cover("a"), fixtures.wedge_cover("b")
        self.assertTrue(covering.graph_covering_check(first).is_covering)
        self.assertTrue(covering.graph_covering_check(second).is_covering)
        self.assertIsNone(covering.covering_factorization(first, second))
        self.assertIsNone(covering.covering_factorization(second, first))

    def test_factorization_errors(self):
        folded = GraphMap.make([[0, 1], [1, 2]], [[0, 1]], {0: 0, 1: 1, 2: 0})
        with self.assertRaises(DomainError):
            covering.covering_factorization(folded, folded)
        edge = GraphMap.make([[0, 1]], [[0, 1]], {0: 0, 1: 1})
        with self.assertRaises(DomainError):
            covering.covering_factorization(fixtures.cycle_over_triangle(6), edge)


if __name__ == "__main__":
    unittest.main()
