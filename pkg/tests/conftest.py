import random
from fractions import Fraction

import pytest

from matpot import (
    ArrangementData,
    Context,
    LinearMatroid,
    UniformMatroid,
    discriminant_probe,
    structure_from_arrangement,
)


@pytest.fixture
def u13():
    return UniformMatroid(1, 3)


@pytest.fixture
def u24():
    return UniformMatroid(2, 4)


@pytest.fixture
def linear_pairs():
    # rows (1,0), (0,1), (1,1): every pair is a base
    return LinearMatroid([(1, 0), (0, 1), (1, 1)])


@pytest.fixture
def ctx_u13_m2(u13):
    return Context(u13, 2)


@pytest.fixture(scope="session")
def fixture_data():
    """Two hyperplanes t + z1, t + z2 with unit weights, basepoint (1, -1)."""
    return ArrangementData([(1,), (1,)], (1, 1), (1, -1))


@pytest.fixture(scope="session")
def fixture_structure(fixture_data):
    return structure_from_arrangement(fixture_data, 2)


def draw_k1_instance(rng, n):
    """One well-conditioned rank-1 arrangement family with rational data."""
    while True:
        b = [Fraction(rng.randint(1, 4)) for _ in range(n)]
        a = [Fraction(rng.randint(1, 4)) for _ in range(n)]
        x = [round(rng.uniform(-1.5, 1.5), 3) for _ in range(n)]
        points = sorted(float(-xi / bi) for xi, bi in zip(x, b))
        if min((q - p for p, q in zip(points, points[1:])), default=0.0) < 0.2:
            continue
        data = ArrangementData([(v,) for v in b], a, x)
        if discriminant_probe(data, data.basepoint):
            return data


@pytest.fixture(scope="session")
def random_k1_instances():
    """Ten deterministic rank-1 instances with n in {3, 4}."""
    rng = random.Random(90125)
    out = []
    for idx in range(10):
        out.append(draw_k1_instance(rng, 3 if idx % 2 == 0 else 4))
    return out


@pytest.fixture(scope="session")
def random_k1_structures(random_k1_instances):
    return [structure_from_arrangement(data, 2) for data in random_k1_instances]


@pytest.fixture(scope="session")
def all_structures(fixture_structure, random_k1_structures):
    return [fixture_structure] + random_k1_structures
