import numpy as np
import pytest
import sympy as sp

from painleve_pencils.charts import _matrix, chart_matrix, phi_affine
from painleve_pencils.errors import Indeterminate, ProbeFailed
from painleve_pencils.families import base_points_2d, build_pencils, mu_value
from painleve_pencils.qrt import (
    FiberContext,
    base_points_fiber,
    confinement_probe_2d,
    i1_conditioned,
    i1_fiber,
    i2_fiber,
    judge_probe,
    qrt_map,
    qrt_root,
    quad_roots,
)
from painleve_pencils.uniformization import FamilyTag

from conftest import FAMILIES, canonical_config, random_points, symmetric_config

x, y = sp.symbols("x y")
MONOMIALS = [x**j * y**l for j in range(3) for l in range(3)]


R = sp.Rational
# exact copies of the conftest parameters (kappa, params)
EXACT = {
    "dA1": (None, [R(1, 10), R(2, 10), R(3, 10), R(4, 10), R(6, 10), R(75, 100), R(85, 100), R(8, 10)]),
    "dD4": (None, [R(1, 10), R(1, 4), R(-3, 10), R(9, 20)]),
    "qA1": (2, [R(6, 5), R(4, 5), R(3, 2), R(11, 10), R(9, 10), R(13, 10), R(7, 5), R(88, 91)]),
    "dA0": (R(9, 10), [R(3, 10), R(-1, 2) + sp.I / 5, R(7, 10), R(-1, 5), R(9, 20), R(-3, 5), R(3, 20),
                       R(-3, 10) - sp.I / 5]),
    "qA0": (2, [R(6, 5), R(4, 5), R(3, 2), R(7, 10), R(11, 10), R(9, 10), R(13, 10), R(62500, 81081)]),
}


def exact_base_points(tag):
    k, p = EXACT[tag]
    if tag == "dA1":
        return [(a, -a) for a in p[:4]] + [(a, 1 - a) for a in p[4:]]
    if tag == "dD4":
        return [(a, -a) for a in p]
    if tag == "qA1":
        return [(k * c, k / c) for c in p[:4]] + [(c, 1 / c) for c in p[4:]]
    if tag == "dA0":
        return [(z * (z + k), z * (z - k)) for z in p]
    return [(z + 1 / (k * z), 1 / z + z / k) for z in p]


def _lift(b):
    """Biquadratic in (x, y) as a quadric in X = [x : y : xy : 1]."""
    X1, X2, X3, X4 = sp.symbols("X1:5")
    sub = {
        x**2 * y**2: X3**2, x**2 * y: X1 * X3, x**2: X1**2, x * y**2: X2 * X3,
        x * y: X3 * X4, x: X1 * X4, y**2: X2**2, y: X2 * X4, 1: X4**2,
    }
    poly = sp.Poly(b, x, y)
    return sum(c * sub[x**i * y**j] for (i, j), c in poly.terms()), (X1, X2, X3, X4)


def exact_fiber_pencil(tag, nu):
    """Two biquadratics spanning the invariant pencil on the fiber at nu, exactly.

    The autonomous pencil through the base points is lifted to P^3 and pulled back by the chart.
    """
    pts = exact_base_points(tag)
    rows = [[m.subs({x: a, y: b}) for m in MONOMIALS] for a, b in pts[:4]]
    if tag == "dD4":
        # tangent to x + y = 0 at s_1..s_4: the derivative along (1, 1) vanishes
        rows += [[(sp.diff(m, x) + sp.diff(m, y)).subs({x: a, y: b}) for m in MONOMIALS] for a, b in pts[:4]]
    else:
        rows += [[m.subs({x: a, y: b}) for m in MONOMIALS] for a, b in pts[4:]]
    null = sp.Matrix(rows).nullspace()
    assert len(null) == 2
    A = sp.Matrix(_matrix(FamilyTag(tag), nu, EXACT[tag][0]))
    seg = A * sp.Matrix([x, y, x * y, 1])
    out = []
    for n in null:
        q, Xs = _lift(sum(c * m for c, m in zip(n, MONOMIALS)))
        out.append(sp.expand(q.subs(dict(zip(Xs, seg)), simultaneous=True)))
    return out


def vieta_i1(pencil, x0, y0):
    b1, b2 = pencil
    curve = sp.Poly(sp.expand(b2.subs({x: x0, y: y0}) * b1 - b1.subs({x: x0, y: y0}) * b2).subs(x, x0), y)
    c2, c1, _ = curve.all_coeffs()
    return sp.nsimplify(-c1 / c2 - y0)


def vieta_i2(pencil, x0, y0):
    swapped = [b.subs({x: y, y: x}, simultaneous=True) for b in pencil]
    return vieta_i1(swapped, y0, x0)


NU = {"dA1": sp.Rational(6, 5), "dD4": sp.Rational(7, 5), "qA1": sp.Rational(3, 2),
      "dA0": sp.Rational(4, 3), "qA0": sp.Rational(3, 2)}


@pytest.mark.parametrize("tag", FAMILIES)
def test_involutions_match_pencil_oracle(tag):
    cfg = canonical_config(tag)
    nu = NU[tag]
    pencil = exact_fiber_pencil(tag, nu)
    ctx = FiberContext(cfg, cfg.param(complex(nu)))
    for x0, y0 in [(sp.Rational(1, 3) + sp.I / 7, sp.Rational(-2, 5)), (sp.Rational(5, 4), sp.Rational(3, 7) - sp.I / 3)]:
        want1 = complex(vieta_i1(pencil, x0, y0))
        want2 = complex(vieta_i2(pencil, x0, y0))
        assert i1_fiber(ctx, complex(x0), complex(y0)) == pytest.approx(want1, rel=1e-10)
        assert i2_fiber(ctx, complex(x0), complex(y0)) == pytest.approx(want2, rel=1e-10)


# Fixed by the exact pencil oracle above: dA1 with the conftest vector at nu = 1, (x, y) = (1, 3/10)
DA1_I1_AT_ONE = sp.Rational(65, 1447)


def test_dA1_i1_frozen_value():
    cfg = canonical_config("dA1")
    pencil = exact_fiber_pencil("dA1", sp.Integer(1))
    assert vieta_i1(pencil, sp.Integer(1), sp.Rational(3, 10)) == DA1_I1_AT_ONE
    ctx = FiberContext(cfg, cfg.param(1.0))
    assert i1_fiber(ctx, 1.0, 0.3) == pytest.approx(float(DA1_I1_AT_ONE), rel=1e-13)


@pytest.mark.parametrize("tag", FAMILIES)
def test_involutivity(tag, rng):
    cfg = canonical_config(tag)
    ctx = FiberContext(cfg, cfg.param(1.3 + 0.2j))
    for x0, y0 in random_points(rng, 10):
        y1 = i1_fiber(ctx, x0, y0)
        assert i1_fiber(ctx, x0, y1) == pytest.approx(y0, rel=1e-9)
        x1 = i2_fiber(ctx, x0, y0)
        assert i2_fiber(ctx, x1, y0) == pytest.approx(x0, rel=1e-9)


@pytest.mark.parametrize("tag", FAMILIES)
def test_symmetric_involutions_are_conjugate(tag, rng):
    cfg = symmetric_config(tag)
    ctx = FiberContext(cfg, cfg.param(0.9 - 0.3j))
    for x0, y0 in random_points(rng, 5):
        assert i1_fiber(ctx, x0, y0) == pytest.approx(i2_fiber(ctx, y0, x0), rel=1e-9)
        # f o f = F for the QRT root
        assert np.allclose(qrt_root(ctx, *qrt_root(ctx, x0, y0)), qrt_map(ctx, x0, y0), rtol=1e-9)


@pytest.mark.parametrize("tag", FAMILIES)
def test_invariant_is_conserved(tag, rng):
    cfg = canonical_config(tag)
    _, ppencil = build_pencils(cfg)
    p = cfg.param(1.2 - 0.1j)
    ctx = FiberContext(cfg, p)
    chart = chart_matrix(tag, p, cfg.kappa)
    x0, y0 = random_points(rng, 1)[0]
    mu0 = mu_value(ppencil, phi_affine(chart, x0, y0))
    for _ in range(100):
        x0, y0 = qrt_map(ctx, x0, y0)
        assert mu_value(ppencil, phi_affine(chart, x0, y0)) == pytest.approx(mu0, rel=1e-7)


@pytest.mark.parametrize("tag", FAMILIES)
def test_base_points_are_indeterminate(tag):
    cfg = canonical_config(tag)
    ctx = FiberContext(cfg, cfg.param(0.8 + 0.1j))
    for a, b in base_points_fiber(ctx):
        with pytest.raises(Indeterminate):
            i1_fiber(ctx, a, b)


def test_fiber_base_points_reduce_to_autonomous():
    for tag in FAMILIES:
        cfg = canonical_config(tag)
        ctx = FiberContext(cfg, cfg.param(cfg.autonomous_origin))
        assert np.allclose(base_points_fiber(ctx), base_points_2d(cfg))
    cfg = canonical_config("dA1")
    pts = base_points_fiber(FiberContext(cfg, cfg.param(2.7)))
    assert pts[:4] == base_points_2d(cfg)[:4]


def test_quad_roots():
    r = quad_roots(1, -1e8, 1)
    assert sorted(abs(z) for z in r) == pytest.approx([1e-8, 1e8], rel=1e-15)
    r = quad_roots(2, 3 + 1j, -5)
    for z in r:
        assert abs(2 * z * z + (3 + 1j) * z - 5) < 1e-13


def test_conditioned_solve_reports_amplification():
    cfg = canonical_config("qA0")
    ctx = FiberContext(cfg, cfg.param(1.3 + 0.2j))
    _, cond = i1_conditioned(ctx, 0.4 + 0.1j, -0.7)
    assert cond >= 1


@pytest.mark.parametrize("tag", FAMILIES)
@pytest.mark.parametrize("index", range(1, 9))
def test_confinement_probe_2d(tag, index):
    cfg = canonical_config(tag)
    ctx = FiberContext(cfg, cfg.param(1.3 + 0.2j))
    report = confinement_probe_2d(ctx, index, 1e-4)
    assert report.passed
    assert 30 <= report.collapse_ratio <= 300


def test_probe_at_zero_eps_is_indeterminate():
    cfg = canonical_config("dA1")
    ctx = FiberContext(cfg, cfg.param(1.3))
    with pytest.raises(Indeterminate):
        confinement_probe_2d(ctx, 1, 0.0)


def test_probe_index_range():
    cfg = canonical_config("dA1")
    with pytest.raises(ValueError):
        confinement_probe_2d(FiberContext(cfg, cfg.param(1.3)), 9, 1e-4)


def test_judge_rejects_non_collapsing_orbit():
    outs = {1e-2: [0.1, 0.5], 1e-4: [0.1, 0.5]}
    with pytest.raises(ProbeFailed) as err:
        judge_probe("dA1", 1, 1e-4, (0.3, 0.3), (1e-4, 1e-6), (1e-4, 1e-6), outs)
    assert not err.value.report.passed
