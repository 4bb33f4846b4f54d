import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from painleve_pencils.errors import BranchPole
from painleve_pencils.uniformization import (
    UniformParam,
    deck_involution_check,
    lambda_at,
    lambda_of,
    shift,
    sqrt_delta_at,
    sqrt_delta_of,
)

from conftest import FAMILIES
from test_pencil_core import lam, sympy_delta

v, kap = sp.symbols("v kappa")


@pytest.mark.parametrize("tag", FAMILIES)
def test_uniformization_squares_to_delta(tag):
    """Delta(lambda(v)) = sqrtDelta(v)^2 identically, with Delta from the symbolic determinant."""
    delta = sympy_delta(tag, None).as_expr()
    lam_v = lambda_at(tag, v, kap)
    root = sqrt_delta_at(tag, v, kap)
    assert sp.simplify(delta.subs(lam, lam_v) - root**2) == 0


def test_lambda_examples():
    assert lambda_at("dA1", 0) == pytest.approx(0.25)
    assert lambda_at("dA1", 1) == 0
    assert lambda_at("qA1", 1, 2) == pytest.approx(-1 / 9)
    assert lambda_at("qA1", 2, 2) == 0


def test_sqrt_delta_examples():
    assert sqrt_delta_at("dA1", 3) == 3
    assert sqrt_delta_at("qA1", 1, 2) == 0
    # w = kappa is the lambda = 0 fiber where sqrt(Delta) = +1
    assert sqrt_delta_at("qA0", 2, 2) == pytest.approx(1)


def test_shift_examples():
    p = UniformParam("dA1", 1.0, 0.1)
    assert shift(p, 2).value == pytest.approx(1.2)
    assert shift(p, 0) == p
    q = UniformParam("qA1", 1.0, 2.0)
    assert shift(q, -1).value == pytest.approx(0.5)


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_shift_composes(j, k):
    for p in (UniformParam("dA0", 0.7 + 0.1j, 0.3), UniformParam("qA0", 1.1 - 0.2j, 1.05 + 0.02j)):
        assert shift(shift(p, j), k) == shift(p, j + k)


@pytest.mark.parametrize("tag, value", [("dA1", 0.7), ("qA1", 3.0), ("dA0", -2.0), ("qA0", 0.4 + 0.3j)])
def test_deck_involution(tag, value):
    kappa = None if tag in ("dA1", "dD4") else 2.0
    assert deck_involution_check(UniformParam(tag, value, 0.1 if tag[0] == "d" else 1.1), kappa) < 1e-14


@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_deck_involution_property(w):
    assert deck_involution_check(UniformParam("qA1", w, 1.1), 1.7 + 0.2j) < 1e-12
    assert deck_involution_check(UniformParam("dA1", w, 0.2)) < 1e-12


def test_param_errors():
    with pytest.raises(ValueError):
        UniformParam("qA1", 1.0, 0)
    with pytest.raises(BranchPole):
        UniformParam("qA0", 0, 1.1)
    with pytest.raises(BranchPole):
        lambda_at("qA1", 1.0, 1)
    with pytest.raises(BranchPole):
        sqrt_delta_at("qA0", 0, 2)


def test_param_accessors():
    p = UniformParam("qA0", 2.0, 1.1, 3)
    assert p.kind == "multiplicative"
    assert lambda_of(p, 2) == lambda_at("qA0", 2.0 * 1.1**3, 2)
    assert sqrt_delta_of(p, 2) == sqrt_delta_at("qA0", 2.0 * 1.1**3, 2)
