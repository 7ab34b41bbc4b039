import logging
import unittest

from gelfkit import schema
from gelfkit.error import InputError, SchemaError


class TestSchemaMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_pointer(self):
        self.assertEqual(schema.pointer([]), "/")
        self.assertEqual(schema.pointer(["blocks", 1]), "/blocks/1")

    def test_valid_documents(self):
        schema.validate({"blocks": [2, 1]}, "algebra")
        schema.validate({"block": 0, "line": ["1", "1/2-i", 3]}, "point")
        schema.validate({"size": 3, "faces": [[0, 1], [1, 2], [0, 2]]}, "cover")
        schema.validate({"projective": {"n": 2}}, "cover")
        schema.validate(
            {"product": {"base": {"size": 2, "faces": [[0, 1]]}, "fiber": {"projective": {"n": 1}}}}, "cover"
        )
        schema.validate({"vertices": ["v"], "edges": [["v", "v"]], "cells": [["e1", "e1~"]]}, "complex")
        schema.validate({"elements": ["0", "1"], "leq": [[0, 1]], "zero": 0}, "lattice")

    def test_missing_property(self):
        with self.assertRaises(SchemaError) as ctx:
            schema.validate({}, "algebra")
        self.assertEqual(ctx.exception.path, "/")
        self.assertIn("blocks", ctx.exception.message)

    def test_nested_path(self):
        with self.assertRaises(SchemaError) as ctx:
            schema.validate({"blocks": [2, 0]}, "algebra")
        self.assertEqual(ctx.exception.path, "/blocks/1")
        with self.assertRaises(SchemaError) as ctx:
            schema.validate({"blocks": []}, "algebra")
        self.assertEqual(ctx.exception.path, "/blocks")

    def test_bad_scalar(self):
        with self.assertRaises(SchemaError) as ctx:
            schema.validate({"block": 0, "line": ["x"]}, "point")
        self.assertEqual(ctx.exception.path, "/line/0")

    def test_bad_cell_letter(self):
        with self.assertRaises(SchemaError) as ctx:
            schema.validate({"vertices": ["v"], "edges": [["v", "v"]], "cells": [["f1"]]}, "complex")
        self.assertEqual(ctx.exception.path, "/cells/0/0")

    def test_unknown_kind(self):
        with self.assertRaises(SchemaError):
            schema.validate({}, "manifold")

    def test_schema_error_is_input_error(self):
        with self.assertRaises(InputError):
            schema.validate({"blocks": "2"}, "algebra")


if __name__ == "__main__":
    unittest.main()
