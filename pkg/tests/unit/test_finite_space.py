import logging
import unittest

import tests.unit.fixtures_spaces as fixtures  # pylint: disable=import-error
from gelfkit import finite_space
from gelfkit.error import ResourceError, StructuralError
from gelfkit.finite_space import ContinuousMap, FiniteSpace
from gelfkit.order import FilterRep, enumerate_ultrafilters, is_principal


class TestFiniteSpaceMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_make_sorts_opens(self):
        x = FiniteSpace.make(["a", "b"], [3, 0, 1, 1])
        self.assertEqual(x.opens, (0, 1, 3))
        self.assertEqual(x, FiniteSpace.make(["a", "b"], [0, 1, 3]))

    def test_not_a_topology(self):
        with self.assertRaises(StructuralError):
            FiniteSpace.make(["a", "b", "c"], [0, 1, 2, 7])
        with self.assertRaises(StructuralError):
            FiniteSpace.make(["a", "b"], [0, 1])
        with self.assertRaises(StructuralError):
            FiniteSpace.from_sets(["a"], [[], [0], [4]])

    def test_sierpinski(self):
        x = fixtures.SIERPINSKI
        self.assertFalse(x.is_discrete())
        self.assertFalse(x.is_hausdorff())
        self.assertEqual(x.minimal_open(0), 0b01)
        self.assertEqual(x.minimal_open(1), 0b11)
        self.assertEqual(x.closure(0b01), 0b11)
        self.assertEqual(x.closure(0b10), 0b10)
        self.assertTrue(x.is_closed(0b10))

    def test_discrete(self):
        x = FiniteSpace.discrete(["a", "b", "c"])
        self.assertEqual(len(x.opens), 8)
        self.assertTrue(x.is_discrete())
        self.assertTrue(x.is_hausdorff())

    def test_discrete_too_large(self):
        with self.assertRaises(ResourceError):
            FiniteSpace.discrete([f"p{i}" for i in range(finite_space.MAX_SUBSET_POINTS + 1)])

    def test_open_lattice(self):
        lat = finite_space.open_lattice(fixtures.SIERPINSKI)
        self.assertEqual(lat.names, ("{}", "{o}", "{o,c}"))
        self.assertEqual(lat.zero, 0)
        self.assertEqual(enumerate_ultrafilters(lat), [FilterRep.of([1, 2])])

    def test_ultrafilter_limits(self):
        self.assertEqual(finite_space.ultrafilter_limits(fixtures.SIERPINSKI, FilterRep.of([1, 2])), 0b11)
        self.assertEqual(finite_space.ultrafilter_limits(fixtures.SIERPINSKI, FilterRep.of([2])), 0b10)

    def test_continuous_map(self):
        x = fixtures.SIERPINSKI
        ident = ContinuousMap.identity(x)
        self.assertEqual(ident.compose(ident).mapping, (0, 1))
        self.assertEqual(ident.preimage_hom().mapping, (0, 1, 2))
        self.assertEqual(ContinuousMap.to_point(x).image(0b11), 0b1)
        with self.assertRaises(StructuralError):
            ContinuousMap(x, x, (1, 0))

    def test_topology_generated_by(self):
        x = finite_space.topology_generated_by(["a", "b", "c"], [0b011, 0b110])
        self.assertEqual(x.opens, (0, 0b010, 0b011, 0b110, 0b111))

    def test_initial_topology(self):
        x = finite_space.initial_topology(["a", "b"], [([0, 1], fixtures.SIERPINSKI)])
        self.assertEqual(x.opens, (0, 1, 3))

    def test_final_topology(self):
        x = finite_space.final_topology(["x", "y"], [(fixtures.SIERPINSKI, [0, 1])])
        self.assertEqual(x.opens, (0, 1, 3))

    def test_face_poset_space(self):
        x = finite_space.face_poset_space([[0, 1]])
        self.assertEqual(x.points, ("v0", "v1", "v0v1"))
        self.assertEqual(x.opens, (0, 0b100, 0b101, 0b110, 0b111))
        self.assertEqual(finite_space.star_cover(x), [0b101, 0b110, 0b100])
        self.assertEqual(finite_space.star_cover(x, [0, 1]), [0b101, 0b110])

    def test_vertex_star_cover(self):
        tetrahedron = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        self.assertEqual(len(finite_space.simplex_faces(tetrahedron)), 14)
        x, members = finite_space.vertex_star_cover(tetrahedron)
        self.assertEqual(x.size, 14)
        self.assertEqual(len(members), 4)
        self.assertEqual(x.points[:4], ("v0", "v1", "v2", "v3"))
        self.assertEqual([bin(m).count("1") for m in members], [7, 7, 7, 7])

    def test_discrete_ultrafilters_are_points(self):
        for n in range(1, 7):
            x = FiniteSpace.discrete([f"p{i}" for i in range(n)])
            lat = finite_space.open_lattice(x)
            ultrafilters = enumerate_ultrafilters(lat)
            self.assertEqual(len(ultrafilters), n)
            singletons = set()
            for f in ultrafilters:
                generator = is_principal(lat, f)
                self.assertIsNotNone(generator)
                mask = x.opens[generator]
                self.assertEqual(bin(mask).count("1"), 1)
                self.assertEqual(finite_space.ultrafilter_limits(x, f), mask)
                singletons.add(mask)
            self.assertEqual(singletons, {1 << p for p in range(n)})


if __name__ == "__main__":
    unittest.main()
