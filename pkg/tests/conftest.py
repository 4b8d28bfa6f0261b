import numpy as np
import pytest

from nlfkpp import (
    DirichletExtension,
    Field,
    Grid1D,
    Kernel,
    ModelParams,
    Periodic,
)

BUILTIN_SHAPES = ("uniform", "logistic", "gaussian")


@pytest.fixture
def unit_params():
    return ModelParams(alpha=1.0, beta=1.0, mu=1.0, kappa=1.0)


def periodic_grid(n=256, x_left=-5.0, x_right=5.0):
    return Grid1D(x_left, x_right, n, Periodic())


def dirichlet_grid(n=256, x_left=-5.0, x_right=5.0, left=1.0, right=0.0):
    return Grid1D(x_left, x_right, n, DirichletExtension(left, right))


def constant_field(grid, value, time=0.0):
    return Field(grid, np.full(grid.n_nodes, float(value)), time)


def random_nonneg_field(grid, rng, scale=1.0):
    return Field(grid, scale * rng.random(grid.n_nodes))


def triangle_kernel(sigma=1.0):
    """Tabulated hat kernel on [-1, 1]: exact unit mass under trapezoid."""
    return Kernel(
        "tabulated",
        sigma=sigma,
        samples=((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)),
        floor_radius=0.5,
        floor_value=0.49,
    )
