"""The 3D Painleve map F~ = R1 i1 L1 R2 i2 L2, orbits, recurrence residuals and audits.

A state (x_n, y_n, p) lives on the quadric with index 2n - 1/2; one step moves p by four
half-steps, passing through the quadrics 2n, 2n + 1/2, 2n + 1 and 2n + 3/2.
"""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import prod
from typing import List, Tuple

import numpy as np

from .charts import chart_matrix, phi_affine, phi_inverse_affine
from .deformation import L_homogeneous, factor_map
from .errors import PencilError, PrecisionExhausted, StageError
from .families import base_points, base_points_2d, infinitely_near_directions, require_symmetric
from .jets import Dual, deriv_of, value_of
from .pencil_core import projective_distance, quadric_space_dim_through
from .qrt import (
    FiberContext,
    UPoly,
    base_points_fiber,
    chordal_p1,
    i1_conditioned,
    i2_conditioned,
    judge_probe,
    probe_index,
    quad_roots,
    PROBE_SAMPLES,
    PROBE_SCALES,
    probe_scales,
)
from .uniformization import FamilyTag, UniformParam, shift

EPS = np.finfo(float).eps
PRECISION_BUDGET = 1e-6
DEFAULT_ORIGIN = 1.3 + 0.2j
STAGES = ("L2", "i2", "R2", "L1", "i1", "R1")


@dataclass(frozen=True)
class OrbitState:
    n: Fraction
    x: complex
    y: complex
    p: UniformParam


@dataclass
class OrbitTrace:
    states: List[OrbitState]
    intermediates: List[Tuple[Tuple[str, complex, complex, UniformParam], ...]] = field(default_factory=list)
    predicted_error: float = 0.0


def initial_state(cfg, x, y, origin, n=0):
    """State n with p at index 2n - 1/2 counted from the integer-index origin ``origin``."""
    n = Fraction(n)
    return OrbitState(n, complex(x), complex(y), cfg.param(origin, int(4 * n - 1)))


def _run(stage, fn, *args):
    try:
        return fn(*args)
    except StageError:
        raise
    except (PencilError, ZeroDivisionError, OverflowError, ValueError) as exc:
        raise StageError(stage, exc) from exc


def step_with_stages(cfg, s):
    """One step of F~; returns (new state, stage outputs, summed amplification factor)."""
    x, y, p = s.x, s.y, s.p
    stages = []
    x, y, p = _run("L2", factor_map, cfg, p, x, y, "L2")
    stages.append(("L2", x, y, p))
    x, c2 = _run("i2", i2_conditioned, FiberContext(cfg, p), x, y)
    stages.append(("i2", x, y, p))
    x, y, p = _run("R2", factor_map, cfg, p, x, y, "R2")
    stages.append(("R2", x, y, p))
    x, y, p = _run("L1", factor_map, cfg, p, x, y, "L1")
    stages.append(("L1", x, y, p))
    y, c1 = _run("i1", i1_conditioned, FiberContext(cfg, p), x, y)
    stages.append(("i1", x, y, p))
    x, y, p = _run("R1", factor_map, cfg, p, x, y, "R1")
    stages.append(("R1", x, y, p))
    return OrbitState(s.n + 1, x, y, p), tuple(stages), c1 + c2


def step(cfg, s):
    """F~ = i~1 o i~2 with i~2 = R2 i2 L2 and i~1 = R1 i1 L1."""
    return step_with_stages(cfg, s)[0]


def orbit(cfg, s, n_steps, budget=PRECISION_BUDGET):
    """Iterate ``step``; raises PrecisionExhausted once the predicted relative error exceeds ``budget``."""
    trace = OrbitTrace([s])
    err = 0.0
    for _ in range(n_steps):
        s, stages, cond = step_with_stages(cfg, s)
        err += EPS * cond
        if err > budget:
            raise PrecisionExhausted(f"predicted relative error {err:.2e} after {len(trace.states)} steps")
        trace.states.append(s)
        trace.intermediates.append(stages)
    trace.predicted_error = err
    return trace


def sigma(x, y):
    return y, x


def symmetric_root_step(cfg, s):
    """f~ = sigma o R2 o i2 o L2: (x_n, y_n) -> (y_n, x_{n+1}) on the quadric 2n + 1/2."""
    require_symmetric(cfg)
    x, y, p = _run("L2", factor_map, cfg, s.p, s.x, s.y, "L2")
    x, _ = _run("i2", i2_conditioned, FiberContext(cfg, p), x, y)
    x, y, p = _run("R2", factor_map, cfg, p, x, y, "R2")
    x, y = sigma(x, y)
    return OrbitState(s.n + Fraction(1, 2), x, y, p)


def conjugacy_check(cfg, s):
    """Distance between L2(F~(s)) and (L i1 L i2)(L2(s)), the L's applied in P^3."""
    t = step(cfg, s)
    xl, yl, pl = factor_map(cfg, t.p, t.x, t.y, "L2")
    lhs = phi_affine(chart_matrix(cfg.tag, pl, cfg.kappa), xl, yl)

    x, y, p = factor_map(cfg, s.p, s.x, s.y, "L2")
    x = i2_conditioned(FiberContext(cfg, p), x, y)[0]
    X = L_homogeneous(cfg, p, phi_affine(chart_matrix(cfg.tag, p, cfg.kappa), x, y))
    p = shift(p, 2)
    x, y = phi_inverse_affine(chart_matrix(cfg.tag, p, cfg.kappa), X)
    y = i1_conditioned(FiberContext(cfg, p), x, y)[0]
    X = L_homogeneous(cfg, p, phi_affine(chart_matrix(cfg.tag, p, cfg.kappa), x, y))
    return projective_distance(lhs, X)


# --- recurrences ---------------------------------------------------------------------


def _rel(lhs, rhs):
    d = abs(lhs) + abs(rhs)
    return abs(lhs - rhs) / d if d else 0.0


def _eq1(cfg, P, x0, y0, x1):
    """First equation of the family's system; P is the position of quadric 2n - 1/2."""
    N = lambda j: shift(P, j).value  # noqa: E731
    a, k, t = cfg.params, cfg.kappa, cfg.tag
    if t is FamilyTag.dA1:
        v = N(1)
        lhs = (x1 + y0) * (x0 + y0) / ((x1 + y0 - N(2)) * (x0 + y0 - N(0)))
        rhs = prod(y0 + ai for ai in a[:4]) / prod(y0 + ai - (1 + v) / 2 for ai in a[4:])
        return _rel(lhs, rhs)
    if t is FamilyTag.dD4:
        lhs = N(2) / (x1 + y0) + N(0) / (x0 + y0)
        rhs = N(1) / 2 * sum(1 / (y0 + ai) for ai in a)
        return _rel(lhs, rhs)
    if t is FamilyTag.qA1:
        w = N(1)
        lhs = (x1 * y0 - N(3) * w) * (x0 * y0 - w * N(-1)) / ((x1 * y0 - 1) * (x0 * y0 - 1))
        rhs = prod(y0 - w / c for c in a[:4]) / prod(y0 - 1 / c for c in a[4:])
        return _rel(lhs, rhs)
    if t is FamilyTag.dA0:
        U = UPoly(a)
        kv, kp, km = k * N(1), k * N(3), k * N(-1)
        out = 0.0
        for eta in quad_roots(1, -kv, -y0):
            lhs = (x1 - eta * (eta + kp)) * (x0 - eta * (eta + km)) / (
                (x1 - (eta - kv) * (eta - kp - kv)) * (x0 - (eta - kv) * (eta - kv - km))
            )
            out = max(out, _rel(lhs, U(eta) / U(kv - eta)))
        return out
    U = UPoly(a, laurent=True)
    w, wp, wm = N(1), N(3), N(-1)
    out = 0.0
    for eta in quad_roots(1, -w * y0, w):
        lhs = (x1 - eta - 1 / (wp * eta)) * (x0 - eta - 1 / (wm * eta)) / (
            (x1 - w / eta - eta / (w * wp)) * (x0 - w / eta - eta / (w * wm))
        )
        out = max(out, _rel(lhs, U(eta) / U(w / eta)))
    return out


def _eq2(cfg, P, x1, y0, y1):
    N = lambda j: shift(P, j).value  # noqa: E731
    a, k, t = cfg.params, cfg.kappa, cfg.tag
    if t is FamilyTag.dA1:
        v = N(3)
        lhs = (x1 + y1) * (x1 + y0) / ((x1 + y1 - N(4)) * (x1 + y0 - N(2)))
        rhs = prod(x1 - ai for ai in a[:4]) / prod(x1 - ai - (v - 1) / 2 for ai in a[4:])
        return _rel(lhs, rhs)
    if t is FamilyTag.dD4:
        lhs = N(4) / (x1 + y1) + N(2) / (x1 + y0)
        rhs = N(3) / 2 * sum(1 / (x1 - ai) for ai in a)
        return _rel(lhs, rhs)
    if t is FamilyTag.qA1:
        w = N(3)
        lhs = (y1 * x1 - N(5) * w) * (y0 * x1 - w * N(1)) / ((y1 * x1 - 1) * (y0 * x1 - 1))
        rhs = prod(x1 - w * c for c in a[:4]) / prod(x1 - c for c in a[4:])
        return _rel(lhs, rhs)
    if t is FamilyTag.dA0:
        U = UPoly(a)
        kv, kp, km = k * N(3), k * N(5), k * N(1)
        out = 0.0
        for xi in quad_roots(1, kv, -x1):
            lhs = (y1 - xi * (xi - kp)) * (y0 - xi * (xi - km)) / (
                (y1 - (xi + kv) * (xi + kp + kv)) * (y0 - (xi + kv) * (xi + kv + km))
            )
            out = max(out, _rel(lhs, U(xi) / U(-kv - xi)))
        return out
    U = UPoly(a, laurent=True)
    w, wp, wm = N(3), N(5), N(1)
    out = 0.0
    for xi in quad_roots(w, -w * x1, 1):
        lhs = (y1 - 1 / xi - xi / wp) * (y0 - 1 / xi - xi / wm) / (
            (y1 - w * xi - 1 / (wp * w * xi)) * (y0 - w * xi - 1 / (w * wm * xi))
        )
        out = max(out, _rel(lhs, U(xi) / U(1 / (w * xi))))
    return out


def _positions(cfg, trace):
    p0 = trace.states[0].p
    return [replace(p0, step=cfg.step, offset=p0.offset + 4 * k) for k in range(len(trace.states))]


def verify_recurrence(cfg, trace):
    """Relative residuals of the family's two-equation system for each consecutive pair of states."""
    if len(trace.states) < 2:
        raise ValueError("need at least two states")
    out = []
    for P, s, t in zip(_positions(cfg, trace), trace.states, trace.states[1:]):
        out.append((_eq1(cfg, P, s.x, s.y, t.x), _eq2(cfg, P, t.x, s.y, t.y)))
    return out


def verify_single_field(cfg, trace):
    """Residuals of the one-field equation for u_{2n-1} = x_n, u_{2n} = y_n (symmetric configs).

    The one-field equation is the first equation of the system read at every u-index.
    """
    require_symmetric(cfg)
    p0 = replace(trace.states[0].p, step=cfg.step)
    u = [c for s in trace.states for c in (s.x, s.y)]
    out = []
    for m in range(1, len(u) - 1):
        # u[m] sits on the quadric with index m - 1 + 2 n0 ... measured in half-steps from p0
        P = replace(p0, offset=p0.offset + 2 * (m - 1))
        out.append(_eq1(cfg, P, u[m - 1], u[m], u[m + 1]))
    return out


def negative_control(cfg, s, n_steps=12):
    """Largest residual of an autonomous orbit checked against the deformed system of ``cfg``."""
    auto = cfg.autonomous()
    start = replace(s, p=replace(s.p, step=auto.step))
    trace = orbit(auto, start, n_steps)
    return max(max(r) for r in verify_recurrence(cfg, trace))


# --- singularity confinement and the net of quadrics -----------------------------------


def confinement_probe_3d(cfg, i, eps, origin=DEFAULT_ORIGIN):
    """Seed near L1^{-1}{x = a_i}, apply i~1 then i~2, at eps and eps/100.

    The seed lives on the quadric at ``origin`` (the position where i~1 starts).
    """
    j = probe_index(cfg, i)
    p = cfg.param(origin)
    a = base_points_fiber(FiberContext(cfg, shift(p, 1)))[j - 1][0]
    # collapse target R1(s_i) and the blown-up line y = b_i on the quadric after L2
    s_i = base_points_fiber(FiberContext(cfg, shift(p, 1)))[j - 1]
    rx, ry, p2 = factor_map(cfg, shift(p, 1), s_i[0], s_i[1], "R1")
    chart2 = chart_matrix(cfg.tag, p2, cfg.kappa)
    target = phi_affine(chart2, rx, ry)
    b = base_points_fiber(FiberContext(cfg, shift(p, 3)))[j - 1][1]
    collapse, mutual, reexp, outs = [], [], [], {}
    for scale in probe_scales(cfg.tag):
        pts = []
        for smp in PROBE_SAMPLES:
            x, y, q = factor_map(cfg, p, a + eps * scale, ry + smp, "L1")
            y = i1_conditioned(FiberContext(cfg, q), x, y)[0]
            pts.append(factor_map(cfg, q, x, y, "R1"))
        ends = []
        for x, y, q in pts:
            x, y, q = factor_map(cfg, q, x, y, "L2")
            x = i2_conditioned(FiberContext(cfg, q), x, y)[0]
            ends.append(factor_map(cfg, q, x, y, "R2"))
        outs[scale] = [x for x, _, _ in ends]
        if scale in PROBE_SCALES:
            imgs = [phi_affine(chart2, x, y) for x, y, _ in pts]
            collapse.append(max(projective_distance(X, target) for X in imgs))
            mutual.append(projective_distance(imgs[0], imgs[1]))
            reexp.append(max(chordal_p1(y, b) for _, y, _ in ends))
    return judge_probe(cfg.tag.value, i, eps, collapse, mutual, reexp, outs)


def _jet(chart, x, y, dx, dy):
    X = phi_affine(chart, Dual(x, dx), Dual(y, dy))
    return [value_of(c) for c in X], [deriv_of(c) for c in X]


def R1_base_points(cfg, origin=DEFAULT_ORIGIN):
    """R1(S_i) on the quadric at shift(p, 1), as homogeneous coordinates (dD4: point + tangent jets)."""
    p = cfg.param(origin)
    chart = chart_matrix(cfg.tag, shift(p, 1), cfg.kappa)
    pts = base_points_fiber(FiberContext(cfg, p))
    if cfg.tag is FamilyTag.dD4:
        jets = []
        for (x, y), (dx, dy) in zip(pts[:4], infinitely_near_directions(cfg)):
            xr, yr, _ = factor_map(cfg, p, Dual(x, dx), Dual(y, dy), "R1")
            jets.append(_jet(chart, value_of(xr), value_of(yr), deriv_of(xr), deriv_of(yr)))
        return jets
    out = []
    for x, y in pts:
        xr, yr, _ = factor_map(cfg, p, x, y, "R1")
        out.append(phi_affine(chart, xr, yr))
    return out


NET_TOL = 1e-12


def net_audit(cfg, origin=DEFAULT_ORIGIN, tol=NET_TOL):
    """(dim of quadrics through the S_i, dim of quadrics through the R1(S_i)).

    Null singular values sit at rounding level (1e-16) while the deformed points keep
    singular values above 1e-9 even for mild steps; the tolerance splits the gap.
    """
    if cfg.tag is FamilyTag.dD4:
        jets = [
            ([x, y, x * y, 1], [dx, dy, x * dy + y * dx, 0])
            for (x, y), (dx, dy) in zip(base_points_2d(cfg)[:4], infinitely_near_directions(cfg))
        ]
        dim_s = quadric_space_dim_through([], tol, jets=jets)
        dim_rs = quadric_space_dim_through([], tol, jets=R1_base_points(cfg, origin))
        return dim_s, dim_rs
    dim_s = quadric_space_dim_through(base_points(cfg), tol)
    dim_rs = quadric_space_dim_through(R1_base_points(cfg, origin), tol)
    return dim_s, dim_rs
