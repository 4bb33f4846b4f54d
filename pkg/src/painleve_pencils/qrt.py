"""QRT involutions on the fibers Q_lambda(nu), base points, and confinement probes in one fiber.

All maps act on affine chart coordinates (x, y) of the fiber at position ``ctx.param``.
Each relation defining a new coordinate is a Mobius relation, solved by cross-multiplication.
"""
import cmath
from dataclasses import dataclass
from math import prod
from typing import Tuple

from .charts import chart_matrix, phi_affine
from .errors import Indeterminate, ProbeFailed, RootPairMismatch
from .families import FamilyConfig
from .pencil_core import projective_distance
from .uniformization import FamilyTag, UniformParam

INDETERMINACY_TOL = 1e-10
ROOT_PAIR_TOL = 1e-9


@dataclass(frozen=True)
class FiberContext:
    """A family configuration together with a position on the uniformizing cover."""

    cfg: FamilyConfig
    param: UniformParam

    @property
    def family(self):
        return self.cfg.tag

    @property
    def kappa(self):
        return self.cfg.kappa

    @property
    def points(self):
        return self.cfg.params

    @property
    def value(self):
        return self.param.value


@dataclass(frozen=True)
class UPoly:
    """U(z) = prod (z - z_i), or z**-4 prod (z - z_i) in the Laurent form."""

    roots: Tuple[complex, ...]
    laurent: bool = False

    def __post_init__(self):
        if len(self.roots) != 8:
            raise ValueError("U needs 8 roots")
        if self.laurent and any(z == 0 for z in self.roots):
            raise ValueError("Laurent form needs nonzero roots")

    def __call__(self, z):
        v = prod(z - r for r in self.roots)
        return v / z ** 4 if self.laurent else v


def base_points_fiber(ctx):
    """The eight points s_i on the fiber at ``ctx.param`` (dD4: s_1..s_4 twice)."""
    v, k, p = ctx.value, ctx.kappa, ctx.points
    t = ctx.family
    if t is FamilyTag.dA1:
        return [(a, -a) for a in p[:4]] + [((v - 1) / 2 + a, (1 + v) / 2 - a) for a in p[4:]]
    if t is FamilyTag.dD4:
        return [(a, -a) for a in p] * 2
    if t is FamilyTag.qA1:
        return [(v * c, v / c) for c in p[:4]] + [(c, 1 / c) for c in p[4:]]
    if t is FamilyTag.dA0:
        return [(z * (z + k * v), z * (z - k * v)) for z in p]
    return [(z + 1 / (v * z), 1 / z + z / v) for z in p]


def _check_regular(ctx, x, y):
    for i, (a, b) in enumerate(base_points_fiber(ctx)):
        if abs(x - a) + abs(y - b) <= INDETERMINACY_TOL * (1 + abs(a) + abs(b)):
            raise Indeterminate(f"({x}, {y}) is the base point s_{i + 1}")


def _solve_ratio(num, den, A, B):
    """t with (t - A)/(t - B) = num/den, plus the amplification factor of the solve."""
    d = den - num
    if d == 0:
        raise ZeroDivisionError("image is at infinity in the affine chart")
    return (A * den - B * num) / d, (abs(num) + abs(den)) / abs(d)


def _i1_dA1(ctx, x, y):
    v, a = ctx.value, ctx.points
    num = prod(x - ai for ai in a[:4]) * (x + y - v)
    den = prod(x - ai - (v - 1) / 2 for ai in a[4:]) * (x + y)
    t, cond = _solve_ratio(num, den, 0, v)  # t = y~ + x with t/(t - v) = num/den
    return t - x, cond


def _i2_dA1(ctx, x, y):
    v, a = ctx.value, ctx.points
    num = prod(y + ai for ai in a[:4]) * (x + y - v)
    den = prod(y + ai - (1 + v) / 2 for ai in a[4:]) * (x + y)
    t, cond = _solve_ratio(num, den, 0, v)
    return t - y, cond


def _i1_dD4(ctx, x, y):
    s = sum(1 / (x - ai) for ai in ctx.points) / 2
    d = s * (x + y) - 1
    if d == 0:
        raise ZeroDivisionError("image is at infinity in the affine chart")
    return (x + y) / d - x, (abs(s * (x + y)) + 1) / abs(d)


def _i2_dD4(ctx, x, y):
    s = sum(1 / (y + ai) for ai in ctx.points) / 2
    d = s * (x + y) - 1
    if d == 0:
        raise ZeroDivisionError("image is at infinity in the affine chart")
    return (x + y) / d - y, (abs(s * (x + y)) + 1) / abs(d)


def _i1_qA1(ctx, x, y):
    w, c = ctx.value, ctx.points
    num = prod(x - w * ci for ci in c[:4]) * (x * y - 1)
    den = prod(x - ci for ci in c[4:]) * (x * y - w * w)
    u, cond = _solve_ratio(num, den, w * w, 1)  # u = x y~
    return u / x, cond


def _i2_qA1(ctx, x, y):
    w, c = ctx.value, ctx.points
    num = prod(y - w / ci for ci in c[:4]) * (x * y - 1)
    den = prod(y - 1 / ci for ci in c[4:]) * (x * y - w * w)
    u, cond = _solve_ratio(num, den, w * w, 1)
    return u / y, cond


def quad_roots(a, b, c):
    """Both roots of a z^2 + b z + c, computed without cancellation."""
    r = cmath.sqrt(b * b - 4 * a * c)
    q = -(b + r) / 2 if abs(b + r) >= abs(b - r) else -(b - r) / 2
    return q / a, c / q


def _u_sensitivity(U, *args):
    """Relative amplification of an input error through U at each argument."""
    extra = 4 if U.laurent else 0
    return sum(extra + sum(abs(z) / max(abs(z - r), 1e-300) for r in U.roots) for z in args)


def _certified(solve, roots):
    (r1, c1), (r2, c2) = solve(roots[0]), solve(roots[1])
    cond = max(c1, c2)
    if abs(r1 - r2) > ROOT_PAIR_TOL * max(1.0, abs(r1)) * max(1.0, cond):
        raise RootPairMismatch(f"root choices give {r1} and {r2}")
    return r1, cond


def _i1_dA0(ctx, x, y):
    kv = ctx.kappa * ctx.value
    U = UPoly(ctx.points)
    def solve(xi):
        A = xi * (xi - kv)
        B = (xi + kv) * (xi + 2 * kv)
        t, cond = _solve_ratio(U(xi) * (y - B), U(-kv - xi) * (y - A), A, B)
        return t, cond * (1 + _u_sensitivity(U, xi, -kv - xi))

    return _certified(solve, quad_roots(1, kv, -x))  # x = xi (xi + kv)


def _i2_dA0(ctx, x, y):
    kv = ctx.kappa * ctx.value
    U = UPoly(ctx.points)
    def solve(eta):
        A = eta * (eta + kv)
        B = (eta - kv) * (eta - 2 * kv)
        t, cond = _solve_ratio(U(eta) * (x - B), U(kv - eta) * (x - A), A, B)
        return t, cond * (1 + _u_sensitivity(U, eta, kv - eta))

    return _certified(solve, quad_roots(1, -kv, -y))  # y = eta (eta - kv)


def _i1_qA0(ctx, x, y):
    w = ctx.value
    U = UPoly(ctx.points, laurent=True)
    def solve(xi):
        A = 1 / xi + xi / w
        B = w * xi + 1 / (w * w * xi)
        t, cond = _solve_ratio(U(xi) * (y - B), U(1 / (w * xi)) * (y - A), A, B)
        return t, cond * (1 + _u_sensitivity(U, xi, 1 / (w * xi)))

    return _certified(solve, quad_roots(w, -w * x, 1))  # x = xi + 1/(w xi)


def _i2_qA0(ctx, x, y):
    w = ctx.value
    U = UPoly(ctx.points, laurent=True)
    def solve(eta):
        A = eta + 1 / (w * eta)
        B = w / eta + eta / (w * w)
        t, cond = _solve_ratio(U(eta) * (x - B), U(w / eta) * (x - A), A, B)
        return t, cond * (1 + _u_sensitivity(U, eta, w / eta))

    return _certified(solve, quad_roots(1, -w * y, w))  # y = 1/eta + eta/w


_I1 = {
    FamilyTag.dA1: _i1_dA1,
    FamilyTag.dD4: _i1_dD4,
    FamilyTag.qA1: _i1_qA1,
    FamilyTag.dA0: _i1_dA0,
    FamilyTag.qA0: _i1_qA0,
}
_I2 = {
    FamilyTag.dA1: _i2_dA1,
    FamilyTag.dD4: _i2_dD4,
    FamilyTag.qA1: _i2_qA1,
    FamilyTag.dA0: _i2_dA0,
    FamilyTag.qA0: _i2_qA0,
}


def i1_conditioned(ctx, x, y):
    """(y~, amplification factor of the solve)."""
    _check_regular(ctx, x, y)
    return _I1[ctx.family](ctx, x, y)


def i2_conditioned(ctx, x, y):
    _check_regular(ctx, x, y)
    return _I2[ctx.family](ctx, x, y)


def i1_fiber(ctx, x, y):
    """The vertical involution: new y for fixed x."""
    return i1_conditioned(ctx, x, y)[0]


def i2_fiber(ctx, x, y):
    """The horizontal involution: new x for fixed y."""
    return i2_conditioned(ctx, x, y)[0]


def qrt_map(ctx, x, y):
    """F = i1 o i2."""
    x = i2_fiber(ctx, x, y)
    return x, i1_fiber(ctx, x, y)


def qrt_root(ctx, x, y):
    """f = i1 o sigma (the QRT root of the symmetric case)."""
    return y, i1_fiber(ctx, y, x)


def chordal_p1(a, b):
    """Chordal distance between two affine points of P^1."""
    return projective_distance((a, 1), (b, 1))


@dataclass(frozen=True)
class ProbeReport:
    family: str
    index: int
    eps: float
    collapse: Tuple[float, float]  # distance to the collapse point at eps and eps/100
    mutual: Tuple[float, float]  # distance between the two sample images
    reexpansion: Tuple[float, float]  # distance to the blown-up line
    spread: Tuple[float, float]  # separation of the re-expanded images at the two re-expansion scales
    drift: float  # movement of the re-expanded images between those scales
    passed: bool

    @property
    def collapse_ratio(self):
        return self.collapse[0] / self.collapse[1]

    @property
    def reexpansion_ratio(self):
        return self.reexpansion[0] / self.reexpansion[1]


PROBE_RATIO = (30.0, 300.0)
PROBE_CONSTANT = 1e4
PROBE_SCALES = (1.0, 1e-2)


def reexpansion_scales(family):
    """Scales for the convergence of the re-expanded images.

    dD4 images meet at second order, so their separation drowns in rounding below eps/100.
    """
    return (1e-1, 1e-2) if FamilyTag(family) is FamilyTag.dD4 else (1e-2, 1e-4)


def probe_scales(family):
    return tuple(sorted(set(PROBE_SCALES) | set(reexpansion_scales(family)), reverse=True))
PROBE_SAMPLES = (0.53 + 0.21j, -0.37 + 0.64j)


def probe_index(cfg, i):
    """dD4 indices 5..8 refer to the infinitely near points over s_1..s_4."""
    if not 1 <= i <= 8:
        raise ValueError("base point index must be in 1..8")
    return i - 4 if cfg.tag is FamilyTag.dD4 and i > 4 else i


def judge_probe(family, index, eps, collapse, mutual, reexp, outs):
    """Collapse, mutual and re-expansion distances are O(eps); the re-expanded images converge apart.

    ``outs`` maps each scale to the pair of re-expanded coordinates.
    """
    lo, hi = PROBE_RATIO
    coarse, fine = reexpansion_scales(family)
    ratios = [collapse[0] / collapse[1], reexp[0] / reexp[1]]
    spread = tuple(chordal_p1(*outs[s]) for s in (coarse, fine))
    drift = max(chordal_p1(a, b) for a, b in zip(outs[coarse], outs[fine]))
    passed = (
        max(collapse[0], reexp[0], mutual[0]) < PROBE_CONSTANT * eps
        and all(lo <= r <= hi for r in ratios)
        and drift < PROBE_CONSTANT * eps * coarse
        # first-order convergence leaves an error of about drift * fine / coarse at the finest scale
        and spread[1] > 10 * drift * fine / coarse
    )
    report = ProbeReport(family, index, eps, tuple(collapse), tuple(mutual), tuple(reexp), spread, drift, passed)
    if not passed:
        raise ProbeFailed(
            f"{family} s_{index}: collapse {collapse}, mutual {mutual}, re-expansion {reexp}, "
            f"spread {spread}, drift {drift:.3e}",
            report,
        )
    return report


def confinement_probe_2d(ctx, i, eps):
    """{x = a_i + eps} --i1--> near s_i --i2--> near {y = b_i}."""
    j = probe_index(ctx.cfg, i)
    a, b = base_points_fiber(ctx)[j - 1]
    chart = chart_matrix(ctx.family, ctx.param, ctx.kappa)
    target = phi_affine(chart, a, b)
    collapse, mutual, reexp, outs = [], [], [], {}
    for scale in probe_scales(ctx.family):
        x = a + eps * scale
        ys = [i1_fiber(ctx, x, b + s) for s in PROBE_SAMPLES]
        outs[scale] = [i2_fiber(ctx, x, y) for y in ys]
        if scale in PROBE_SCALES:
            imgs = [phi_affine(chart, x, y) for y in ys]
            collapse.append(max(projective_distance(X, target) for X in imgs))
            mutual.append(projective_distance(imgs[0], imgs[1]))
            reexp.append(max(chordal_p1(y, b) for y in ys))
    return judge_probe(ctx.family.value, i, eps, collapse, mutual, reexp, outs)
