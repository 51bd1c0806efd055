import numpy as np
import pytest

import nlstrap as nt


@pytest.fixture(scope="session")
def grid512():
    return nt.make_radial_grid(512, 12.0)


@pytest.fixture(scope="session")
def grid256():
    return nt.make_radial_grid(256, 12.0)


@pytest.fixture(scope="session")
def params46():
    return nt.Parameters(4.0, 6.0, 8.0)


@pytest.fixture(scope="session")
def ground_state_4_6_10():
    """Converged fundamental-frequency solution at (p, q, mu, S) = (4, 6, 10, -1);
    shared by the solver, atlas, propagation, and acceptance tests."""
    params = nt.Parameters(4.0, 6.0, 10.0)
    report = nt.solve_ffs(params, -1.0)
    assert report.converged
    return report


def smooth_random_field(grid, rng, n_terms=4, max_width=2.0):
    """Random even smooth decaying profile: Gaussians times even polynomials."""
    r2 = grid.nodes**2
    values = np.zeros(grid.n)
    for _ in range(n_terms):
        a = rng.normal()
        width = rng.uniform(0.5, max_width)
        c2 = rng.normal() * 0.3
        c4 = rng.normal() * 0.05
        values += a * (1.0 + c2 * r2 + c4 * r2**2) * np.exp(-r2 / (2.0 * width**2))
    return nt.RadialField(grid, values)
