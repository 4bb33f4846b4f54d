from fractions import Fraction as F

import numpy as np
import pytest

from painleve_pencils.families import make_config

FAMILIES = ("dA1", "dD4", "qA1", "dA0", "qA0")

# admissible dA1 vector: sum(a_5..a_8) - sum(a_1..a_4) = 2, all entries distinct
A_DA1 = (F(1, 10), F(2, 10), F(3, 10), F(4, 10), F(6, 10), F(75, 100), F(85, 100), F(8, 10))
ORIGIN = 1.3 + 0.2j


def canonical_config(tag, step=None):
    if tag == "dA1":
        return make_config("dA1", A_DA1, 0.25 if step is None else step)
    if tag == "dD4":
        return make_config("dD4", (0.1, 0.25, -0.3, 0.45), 0.2 if step is None else step)
    if tag == "qA1":
        c = (F(6, 5), F(4, 5), F(3, 2), F(11, 10), F(9, 10), F(13, 10), F(7, 5), F(88, 91))
        return make_config("qA1", c, 1.1 if step is None else step, kappa=2)
    if tag == "dA0":
        z = (0.3, -0.5 + 0.2j, 0.7, -0.2, 0.45, -0.6, 0.15, -0.3 - 0.2j)
        return make_config("dA0", z, 0.25 if step is None else step, kappa=0.9)
    z = (F(6, 5), F(4, 5), F(3, 2), F(7, 10), F(11, 10), F(9, 10), F(13, 10), F(62500, 81081))
    return make_config("qA0", z, 1.1 if step is None else step, kappa=2)


def symmetric_config(tag):
    if tag == "dA1":
        return make_config("dA1", (0.15, -0.15, 0.35, -0.35, 0.2, 0.8, 0.4, 0.6), 0.25, symmetric=True)
    if tag == "dD4":
        return make_config("dD4", (0.3, -0.3, 0.55, -0.55), 0.2, symmetric=True)
    if tag == "qA1":
        c = (1.2, 1 / 1.2, 1.5 + 0.1j, 1 / (1.5 + 0.1j), 0.7, 1 / 0.7, 1.3, 1 / 1.3)
        return make_config("qA1", c, 1.1, kappa=2, symmetric=True)
    if tag == "dA0":
        z = (0.3, -0.5 + 0.2j, 0.7, -0.2)
        return make_config("dA0", z + tuple(-v for v in z), 0.25, kappa=0.9, symmetric=True)
    z = (1.2, 0.8 + 0.1j, 1.5, 0.7)
    return make_config("qA0", z + tuple(1 / v for v in z), 1.1, kappa=2, symmetric=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_points(rng, n):
    return [(complex(*rng.normal(size=2)), complex(*rng.normal(size=2))) for _ in range(n)]
