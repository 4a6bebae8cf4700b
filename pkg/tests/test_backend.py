import os
import subprocess
import sys

import pytest

from ulampoly import _backend

BLOCK = """
import sys
class Block:
    def find_spec(self, name, path=None, target=None):
        if name == "ulampoly._ckernel":
            raise ImportError("blocked")
sys.meta_path.insert(0, Block())
import ulampoly
print(ulampoly.BACKEND)
from ulampoly import enumerate_ulam
print(len(enumerate_ulam(3)))
"""


def test_falls_back_without_extension():
    env = {k: v for k, v in os.environ.items() if k != "ULAMPOLY_BACKEND"}
    out = subprocess.run([sys.executable, "-c", BLOCK], capture_output=True, text=True, env=env, check=True)
    assert out.stdout.split() == ["python", "6"]


def test_environment_override():
    env = {**os.environ, "ULAMPOLY_BACKEND": "python"}
    out = subprocess.run([sys.executable, "-c", "import ulampoly; print(ulampoly.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises((KeyError, ValueError, ImportError)):
        _backend.load("fortran")
    assert "python" in _backend.available()
