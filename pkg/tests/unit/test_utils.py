import logging
import os
import unittest
from unittest.mock import patch

from gelfkit import utils
from gelfkit.error import InputError


class TestUtilsMethods(unittest.TestCase):
    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_setup_logging1(self):
        with self.assertRaises(TypeError):
            # pylint: disable=no-value-for-parameter
            utils.setup_logging()

    def test_setup_logging2(self):
        self.assertIsInstance(utils.setup_logging("aaa"), logging.Logger)

    def test_setup_logging3(self):
        self.assertEqual(
            utils.setup_logging("aaa", logging.DEBUG).getEffectiveLevel(), logging.DEBUG
        )

    def test_setup_logging_single_handler(self):
        utils.setup_logging("bbb")
        self.assertEqual(len(utils.setup_logging("bbb").handlers), 1)

    def test_bits(self):
        self.assertEqual(utils.bits(0b1011), [0, 1, 3])
        self.assertEqual(utils.bits(0), [])

    def test_mask_of(self):
        self.assertEqual(utils.mask_of([0, 3]), 9)
        self.assertEqual(utils.bits(utils.mask_of([2, 5])), [2, 5])

    @patch.dict(os.environ, {"GELFKIT_TEST_INT": "7"})
    def test_env_int(self):
        self.assertEqual(utils.env_int("GELFKIT_TEST_INT", 3), 7)

    @patch.dict(os.environ, {}, clear=True)
    def test_env_int_default(self):
        self.assertEqual(utils.env_int("GELFKIT_TEST_INT", 3), 3)

    @patch.dict(os.environ, {"GELFKIT_TEST_INT": "seven"})
    def test_env_int_invalid(self):
        with self.assertRaises(InputError):
            utils.env_int("GELFKIT_TEST_INT", 3)

    @patch.dict(os.environ, {"GELFKIT_TEST_INT": "-1"})
    def test_env_int_negative(self):
        with self.assertRaises(InputError):
            utils.env_int("GELFKIT_TEST_INT", 3)


if __name__ == "__main__":
    unittest.main()
