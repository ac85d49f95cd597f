import random
from fractions import Fraction

import pytest

from nilorth import liealg, systems


@pytest.fixture(scope="session")
def heis():
    return systems.lattice("heisenberg")


@pytest.fixture(scope="session")
def free3():
    return systems.lattice("free_class3")


@pytest.fixture(scope="session")
def torus2():
    return systems.lattice("abelian2")


@pytest.fixture(scope="session")
def heis_susp():
    return systems.heisenberg_suspension()


@pytest.fixture(scope="session")
def bundled_algebras(heis, free3, torus2, heis_susp):
    return [
        torus2.algebra,
        heis.algebra,
        free3.algebra,
        heis_susp.extended.algebra,
    ]


def rand_rational_vector(rng: random.Random, dim: int, span: int = 6, den: int = 4):
    return liealg.vector(
        [Fraction(rng.randint(-span, span), rng.randint(1, den)) for _ in range(dim)]
    )


@pytest.fixture
def rng():
    return random.Random(20260810)
