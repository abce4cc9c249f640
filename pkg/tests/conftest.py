import numpy as np
import pytest

from fracgrad.field import GridSpec, ScalarField
from fracgrad.harness import bump_field, draw_bump_params


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_bump(grid, seed):
    r = np.random.default_rng(seed)
    return bump_field(grid, draw_bump_params(grid.n, grid.extent, r))


def make_dipole(grid, seed):
    """Mean-zero pair of bumps, compactly supported."""
    r = np.random.default_rng(seed)
    a = bump_field(grid, draw_bump_params(grid.n, grid.extent, r))
    b = bump_field(grid, draw_bump_params(grid.n, grid.extent, r))
    vals = a.values - b.values * (a.values.sum() / b.values.sum())
    return ScalarField(grid, np.ascontiguousarray(vals))
