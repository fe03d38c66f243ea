import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import scatsplit as ss


@pytest.fixture(scope="session")
def canonical_barrier():
    """Rectangular bump, height 2, on [0, 1]: tunneling regime at k = 1."""
    return ss.make_rectangular(0.0, 1.0, 2.0)


@pytest.fixture(scope="session")
def free_barrier():
    return ss.make_rectangular(0.0, 2.0, 0.0)


@pytest.fixture(scope="session")
def canonical_sol(canonical_barrier):
    return ss.solve_stationary(canonical_barrier, 1.0)


@pytest.fixture(scope="session")
def canonical_dec(canonical_barrier):
    return ss.decompose(canonical_barrier, 1.0)


@pytest.fixture(scope="session")
def canonical_packet(canonical_barrier):
    """Shared packet; modest spectral resolution keeps the suite fast."""
    return ss.make_gaussian_packet(-40.0, 8.0, 1.0, barrier=canonical_barrier, n=384)


def random_symmetric_barrier(rng, max_segments=3, allow_wells=False):
    """Draw a mirror-symmetric piecewise barrier with sane numerics."""
    n_half = rng.integers(1, max_segments + 1)
    widths = rng.uniform(0.2, 1.5, size=n_half)
    lo = -2.0 if allow_wells else 0.1
    heights = rng.uniform(lo, 6.0, size=n_half)
    a = rng.uniform(-3.0, 1.0)
    return ss.make_symmetric(a, list(zip(widths, heights)))
