r"""
tests/test_config.py

To run, open a terminal in the root project folder.
Activate your virtual environment if needed, and run one of the following commands:

    py tests\test_config.py
    python3 tests/test_config.py

This test suite verifies reading settings from environment variables.
"""

import os
import unittest
import pathlib
import sys
from unittest import mock

# For local imports, temporarily add project root to Python sys.path
PROJECT_ROOT = pathlib.Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))

from utils.config import ConfigError, Settings, read_settings  # noqa: E402

KEYS = ("HDEFORM_LOG_LEVEL", "HDEFORM_LOG_DIR", "HDEFORM_MAX_DIMENSION", "HDEFORM_RESIDUAL_LIMIT", "HDEFORM_GOLDEN_DIR")


def clean_environment(**values):
    environment = {key: value for key, value in os.environ.items() if key not in KEYS}
    environment.update(values)
    return mock.patch.dict(os.environ, environment, clear=True)


class TestReadSettings(unittest.TestCase):

    def test_defaults(self):
        with clean_environment():
            self.assertEqual(read_settings(), Settings())

    def test_overrides(self):
        with clean_environment(HDEFORM_LOG_LEVEL="debug", HDEFORM_MAX_DIMENSION="5", HDEFORM_GOLDEN_DIR="fixtures"):
            settings = read_settings()
        self.assertEqual(settings.log_level, "DEBUG")
        self.assertEqual(settings.max_dimension, 5)
        self.assertEqual(settings.golden_dir, PROJECT_ROOT.joinpath("fixtures"))

    def test_blank_integer_uses_default(self):
        with clean_environment(HDEFORM_RESIDUAL_LIMIT="  "):
            self.assertEqual(read_settings().residual_limit, Settings().residual_limit)

    def test_bad_level(self):
        with clean_environment(HDEFORM_LOG_LEVEL="LOUD"):
            with self.assertRaises(ConfigError):
                read_settings()

    def test_bad_integers(self):
        for value in ("many", "1"):
            with clean_environment(HDEFORM_MAX_DIMENSION=value):
                with self.assertRaises(ConfigError):
                    read_settings()


if __name__ == "__main__":
    unittest.main()
