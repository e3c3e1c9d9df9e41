import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vprbench.imaging import GrayImage  # noqa: E402
from vprbench.synthetic import make_dataset  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_dataset(tmp_path):
    """Ten 64x64 places, queries identical to references."""
    return make_dataset(tmp_path / "ds", n=10, size=(64, 64), seed=7)


def gray(arr):
    return GrayImage(np.asarray(arr, dtype=np.uint8))
