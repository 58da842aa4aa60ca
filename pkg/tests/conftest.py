import math

import numpy as np
import pytest

from treekuramoto import NetworkModel, NoiseSpec, build_tree

LINE5_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4)]
OMEGA5 = np.array([7.0, 10.0, 1.0, 6.0, 2.0])
VARIANCES5 = np.array([3.0, 5.0, 0.5, 2.0, 1.0])
THETA0_5 = np.array(
    [math.pi / 4, math.pi / 8, -math.pi / 8, -math.pi / 5, math.pi / 5]
)


@pytest.fixture
def line5():
    return build_tree(5, LINE5_EDGES)


def make_line5_model(
    means=None, variant="frequency_dependent", kappa=30.0, tau=0.002
):
    """Five-oscillator line network with the reference parameters."""
    graph = build_tree(5, LINE5_EDGES)
    if means is None:
        means = np.zeros(5)
    spec = NoiseSpec.gaussian(VARIANCES5, means)
    return NetworkModel(
        graph=graph,
        omega=OMEGA5.copy(),
        noise=spec,
        kappa=kappa,
        tau=tau,
        variant=variant,
    )


def random_tree(rng, n):
    """Uniform-ish random tree: each node attaches to an earlier one."""
    edges = []
    for node in range(1, n):
        parent = int(rng.integers(0, node))
        if rng.integers(0, 2):
            edges.append((parent, node))
        else:
            edges.append((node, parent))
    return build_tree(n, edges)
