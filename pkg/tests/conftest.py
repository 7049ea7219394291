import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from smap.grid import GridSpec
from smap.spectral import FREQUENCY, ComplexField, to_physical


@pytest.fixture
def grid32():
    return GridSpec(2, 32, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_smooth_field(grid, rng, band=None, amp=1.0):
    """Band-limited random field with a mildly decaying spectrum."""
    spec = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    radius = np.sqrt(grid.wavenumber_sq())
    cut = band if band is not None else grid.nyquist / 2.0
    spec *= (radius < cut) / (1.0 + radius) ** 2
    field = to_physical(ComplexField(grid, 0.0, FREQUENCY, spec))
    field.values *= amp / np.max(np.abs(field.values))
    return field
