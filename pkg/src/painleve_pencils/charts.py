"""Pencil-adapted charts: phi_nu(x, y) = A_nu [x, y, xy, 1] identifies P^1 x P^1 with Q_lambda(nu)."""
from dataclasses import dataclass

import numpy as np

from .errors import ChartDegenerate, InfiniteLambda, OnBaseQuadric
from .families import Q0, q_infinity
from .pencil_core import ProjPoint1, ProjPoint3
from .uniformization import FamilyTag, lambda_of

DEGENERACY_RADIUS = 1e-12
NORMALIZATION_TOL = 1e-10


def _matrix(family, v, k):
    if family in (FamilyTag.dA1, FamilyTag.dD4):
        p, m = (1 + v) / (2 * v), (1 - v) / (2 * v)
        r = (1 - v * v) / (4 * v) if family is FamilyTag.dA1 else 0
        return [[p, m, 0, 0], [m, p, 0, 0], [r, r, 1, 0], [0, 0, 0, 1]]
    if family is FamilyTag.dA0:
        p, m = (v + 1) / (2 * v), (v - 1) / (2 * v)
        r = k * k * (v * v - 1) / 2
        return [[p, m, 0, 0], [m, p, 0, 0], [r, r, 1, 0], [0, 0, 0, 1]]
    d = 1 - v * v
    if family is FamilyTag.qA1:
        return [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, (1 - k * v) / d, v * (k - v) / d],
            [0, 0, (k - v) / (k * d), v * (1 - k * v) / (k * d)],
        ]
    p, m = v * (1 - k * v) / (k * d), v * (k - v) / (k * d)
    return [
        [p, m, 0, 0],
        [m, p, 0, 0],
        [0, 0, v / k, -(1 - k * v) * (k - v) / (k * k * v)],
        [0, 0, 0, 1],
    ]


def normalization_constant(family, p, kappa=None):
    """c in A^T M_lambda A = c M0: 1, or w/kappa for qA0."""
    return p.value / kappa if FamilyTag(family) is FamilyTag.qA0 else 1.0


@dataclass(frozen=True, eq=False)
class ChartMatrix:
    a: np.ndarray
    param: object
    family: FamilyTag
    kappa: object = None

    def __post_init__(self):
        a = np.array(self.a, dtype=complex)
        if not np.all(np.isfinite(a)) or np.linalg.cond(a) > 1e13:
            raise ChartDegenerate("chart matrix is singular or ill-conditioned")
        a.flags.writeable = False
        object.__setattr__(self, "a", a)
        err = normalization_error(self)
        if err > NORMALIZATION_TOL:
            raise ChartDegenerate(f"chart normalization fails (relative error {err:.2e})")

    @property
    def m_lambda(self):
        lam = lambda_of(self.param, self.kappa)
        return Q0.m - lam * q_infinity(self.family, self.kappa).m


def normalization_error(chart):
    """||A^T M_lambda A - c M0||_F / ||c M0||_F."""
    c = normalization_constant(chart.family, chart.param, chart.kappa)
    lhs = chart.a.T @ chart.m_lambda @ chart.a
    return float(np.linalg.norm(lhs - c * Q0.m) / np.linalg.norm(c * Q0.m))


def chart_matrix(family, p, kappa=None):
    """The family's normalizing matrix A_nu / A_w at position p."""
    family = FamilyTag(family)
    v = p.value
    if not np.isfinite(v):
        raise ChartDegenerate("chart is not defined at infinity")
    if family.additive:
        if abs(v) < DEGENERACY_RADIUS:
            raise ChartDegenerate("chart is not defined at nu = 0")
    elif abs(v) < DEGENERACY_RADIUS or abs(v * v - 1) < DEGENERACY_RADIUS:
        raise ChartDegenerate("chart is not defined at w = 0, +-1")
    return ChartMatrix(_matrix(family, v, kappa), p, family, kappa)


def phi_affine(chart, x, y):
    """A [x, y, xy, 1] as a list of 4 scalars (works with any number-like type)."""
    vec = (x, y, x * y, 1)
    return [sum(complex(chart.a[i, j]) * vec[j] for j in range(4) if chart.a[i, j] != 0) for i in range(4)]


def phi(chart, x, y):
    """phi_nu(x, y) for x, y in P^1."""
    ux, vx = x.coords
    uy, vy = y.coords
    seg = np.array([ux * vy, vx * uy, ux * uy, vx * vy])
    return ProjPoint3(chart.a @ seg)


def _pair(p, q):
    return (p, q) if abs(p) + abs(q) > 0 else None


def phi_inverse(chart, X):
    """Pencil-adapted coordinates (x, y) of X and the off-fiber residual."""
    Y = np.linalg.solve(chart.a, np.asarray(getattr(X, "coords", X), dtype=complex))
    Y = Y / np.max(np.abs(Y))
    y1, y2, y3, y4 = Y
    # x = Y1/Y4 = Y3/Y2 and y = Y2/Y4 = Y3/Y1 on the Segre quadric; take the larger pair
    xs = max([(y1, y4), (y3, y2)], key=lambda t: abs(t[0]) + abs(t[1]))
    ys = max([(y2, y4), (y3, y1)], key=lambda t: abs(t[0]) + abs(t[1]))
    residual = float(abs(y1 * y2 - y3 * y4))
    return ProjPoint1(xs), ProjPoint1(ys), residual


def phi_inverse_affine(chart, X):
    x, y, _ = phi_inverse(chart, X)
    return x.affine, y.affine


def lambda_from_point(pencil, X, tol=1e-12):
    """lambda = Q0(X) / Q_inf(X)."""
    X = getattr(X, "coords", X)
    n = np.linalg.norm(np.asarray(X, dtype=complex)) ** 2
    a, b = pencil.m0(X), pencil.minf(X)
    scale0 = np.linalg.norm(pencil.m0.m) * n
    scale1 = np.linalg.norm(pencil.minf.m) * n
    if abs(b) <= tol * scale1:
        if abs(a) <= tol * scale0:
            raise OnBaseQuadric("point lies on the base curve; lambda is indeterminate")
        raise InfiniteLambda("Q_inf vanishes at the point")
    return a / b
