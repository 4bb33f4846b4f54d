import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_pencils.charts import (
    _matrix,
    chart_matrix,
    lambda_from_point,
    normalization_error,
    phi,
    phi_affine,
    phi_inverse,
    phi_inverse_affine,
)
from painleve_pencils.errors import ChartDegenerate, OnBaseQuadric
from painleve_pencils.families import Q0, base_points
from painleve_pencils.pencil_core import ProjPoint1, projective_distance
from painleve_pencils.qrt import FiberContext, base_points_fiber
from painleve_pencils.uniformization import FamilyTag, UniformParam, lambda_at, lambda_of

from conftest import FAMILIES, canonical_config, random_points
from test_pencil_core import Q_INF_SYMBOLIC, XS, k, lam

v = sp.symbols("v")


@pytest.mark.parametrize("tag", FAMILIES)
def test_normalization_symbolic(tag):
    """A^T M_lambda(v) A = c M0 identically in v and kappa."""
    fam = FamilyTag(tag)
    a = sp.Matrix(_matrix(fam, v, k))
    q = XS[0] * XS[1] - XS[2] * XS[3] - lam * Q_INF_SYMBOLIC[tag]
    m = sp.hessian(q, XS).subs(lam, lambda_at(tag, v, k))
    c = v / k if fam is FamilyTag.qA0 else 1
    diff = (a.T * m * a - c * sp.hessian(XS[0] * XS[1] - XS[2] * XS[3], XS)).applyfunc(sp.simplify)
    assert diff == sp.zeros(4, 4)


@pytest.mark.parametrize("tag", FAMILIES)
def test_normalization_numeric(tag):
    cfg = canonical_config(tag)
    for w in (0.37 + 0.2j, 1.7, -2.3 + 0.4j):
        assert normalization_error(chart_matrix(tag, cfg.param(w), cfg.kappa)) < 1e-12


def test_dA1_chart_at_nu_one_is_identity():
    a = chart_matrix("dA1", UniformParam("dA1", 1.0, 0.1))
    assert np.allclose(a.a, np.eye(4))
    X = phi(a, ProjPoint1.from_affine(2), ProjPoint1.from_affine(3))
    assert projective_distance(X, (2, 3, 6, 1)) < 1e-15


def test_qA0_normalization_example():
    chart = chart_matrix("qA0", UniformParam("qA0", 2.0, 1.1), 2.0)
    assert normalization_error(chart) < 1e-14


def test_chart_degenerate():
    with pytest.raises(ChartDegenerate):
        chart_matrix("dA1", UniformParam("dA1", 0.0, 0.1))
    with pytest.raises(ChartDegenerate):
        chart_matrix("qA1", UniformParam("qA1", 1.0, 1.1), 2.0)
    with pytest.raises(ChartDegenerate):
        chart_matrix("qA0", UniformParam("qA0", -1.0, 1.1), 2.0)


@given(st.floats(0.2, 5), st.floats(-3, 3))
def test_dA1_antidiagonal_is_nu_independent(nu, x):
    chart = chart_matrix("dA1", UniformParam("dA1", nu, 0.1))
    X = phi_affine(chart, x, -x)
    assert projective_distance(X, (x, -x, -x * x, 1)) < 1e-12


def test_qA1_autonomous_fiber_is_base_quadric():
    cfg = canonical_config("qA1")
    chart = chart_matrix("qA1", cfg.param(cfg.kappa), cfg.kappa)
    X = phi_affine(chart, 0.3 + 0.1j, -1.2)
    assert abs(Q0(X)) < 1e-14


@pytest.mark.parametrize("tag", FAMILIES)
def test_fiber_base_points_map_to_fixed_base_points(tag):
    cfg = canonical_config(tag)
    S = base_points(cfg)
    for w in (0.7 + 0.3j, 1.9, -1.4):
        ctx = FiberContext(cfg, cfg.param(w))
        chart = chart_matrix(tag, ctx.param, cfg.kappa)
        for (x, y), Si in zip(base_points_fiber(ctx), S):
            assert projective_distance(phi_affine(chart, x, y), Si) < 1e-12


def test_dA1_base_point_formulas():
    cfg = canonical_config("dA1")
    ctx = FiberContext(cfg, cfg.param(0.6))
    pts = base_points_fiber(ctx)
    a = cfg.params
    assert pts[0] == (a[0], -a[0])
    assert np.allclose(pts[4], ((0.6 - 1) / 2 + a[4], 1.6 / 2 - a[4]))


@pytest.mark.parametrize("tag", FAMILIES)
def test_phi_inverse_round_trip(tag, rng):
    cfg = canonical_config(tag)
    chart = chart_matrix(tag, cfg.param(0.8 - 0.4j), cfg.kappa)
    for x, y in random_points(rng, 10):
        X = phi_affine(chart, x, y)
        xx, yy = phi_inverse_affine(chart, X)
        assert xx == pytest.approx(x, rel=1e-10)
        assert yy == pytest.approx(y, rel=1e-10)
        assert phi_inverse(chart, X)[2] < 1e-12


@settings(max_examples=50)
@given(
    st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False),
)
def test_phi_inverse_property(x, y):
    chart = chart_matrix("qA1", UniformParam("qA1", 1.3 + 0.2j, 1.1), 2.0)
    xs, ys, res = phi_inverse(chart, phi(chart, ProjPoint1.from_affine(x), ProjPoint1.from_affine(y)))
    assert projective_distance(xs.coords, (x, 1)) < 1e-9
    assert projective_distance(ys.coords, (y, 1)) < 1e-9


def test_phi_at_infinity():
    chart = chart_matrix("dA1", UniformParam("dA1", 1.0, 0.1))
    X = phi(chart, ProjPoint1((1, 0)), ProjPoint1.from_affine(0.7))
    xs, ys, _ = phi_inverse(chart, X)
    assert xs.is_infinite
    assert ys.affine == pytest.approx(0.7)


@pytest.mark.parametrize("tag", FAMILIES)
def test_lambda_from_point_recovers_fiber(tag, rng):
    cfg = canonical_config(tag)
    p = cfg.param(1.1 + 0.5j)
    chart = chart_matrix(tag, p, cfg.kappa)
    want = lambda_of(p, cfg.kappa)
    for x, y in random_points(rng, 5):
        got = lambda_from_point(cfg.pencil, phi_affine(chart, x, y))
        assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_lambda_from_point_examples():
    cfg = canonical_config("dA1")
    assert lambda_from_point(cfg.pencil, (1, 1, 1, 1)) == 0
    with pytest.raises(OnBaseQuadric):
        lambda_from_point(cfg.pencil, base_points(cfg)[0])
