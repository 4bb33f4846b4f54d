"""The five families: parameter validation, base points and pencils."""
from dataclasses import dataclass, replace
from fractions import Fraction
from math import prod
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (
    ConstraintViolated,
    DegenerateParameter,
    LiftInconsistent,
    NotSymmetric,
)
from .pencil_core import (
    BiquadraticForm,
    ProjPoint1,
    QuadricPencil,
    SymQuadForm,
    biquadratic_space_through,
    restrict_to_segre,
    segre_embed,
    segre_lift,
)
from .uniformization import FamilyTag, UniformParam

CONSTRAINT_TOL = 1e-12
N_PARAMS = {"dA1": 8, "dD4": 4, "qA1": 8, "dA0": 8, "qA0": 8}
NEEDS_KAPPA = {"qA1", "dA0", "qA0"}

Q0 = SymQuadForm.from_monomials({(0, 1): 1, (2, 3): -1})


def q_infinity(tag, kappa=None):
    """The family's Q_inf; qA1 carries an overall minus sign so that its charts normalize."""
    tag = FamilyTag(tag)
    k = kappa
    if tag is FamilyTag.dA1:
        mons = {(0, 0): 1, (0, 1): 2, (1, 1): 1, (0, 3): -1, (1, 3): -1}
    elif tag is FamilyTag.dD4:
        mons = {(0, 0): 1, (0, 1): 2, (1, 1): 1}
    elif tag is FamilyTag.qA1:
        mons = {(2, 2): -1, (2, 3): 1 + k * k, (3, 3): -k * k}
    elif tag is FamilyTag.dA0:
        mons = {(0, 0): 1, (0, 1): -2, (1, 1): 1, (0, 3): -2 * k * k, (1, 3): -2 * k * k}
    else:
        mons = {(0, 0): k, (1, 1): k, (0, 1): -(1 + k * k), (3, 3): (k - 1 / k) ** 2}
    return SymQuadForm.from_monomials(mons)


def expected_char_poly(tag, kappa=None):
    """Closed form of det(M0 - lam Minf) for the family."""
    tag = FamilyTag(tag)
    if tag in (FamilyTag.dA1, FamilyTag.dD4):
        return Polynomial([1, -4])
    if tag is FamilyTag.dA0:
        return Polynomial([1, 4])
    k = kappa
    return Polynomial([1, (1 + k) ** 2]) * Polynomial([1, (1 - k) ** 2])


def _is_exact(v):
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _close(value, target, scale):
    return abs(value - target) <= CONSTRAINT_TOL * max(1.0, scale)


@dataclass(frozen=True)
class FamilyConfig:
    """Validated parameters of one family.

    ``params`` holds a_1..a_8 (dA1), a_1..a_4 (dD4), c_1..c_8 (qA1) or z_1..z_8 (dA0, qA0);
    ``step`` is delta (additive families) or q (multiplicative ones).
    """

    tag: FamilyTag
    params: Tuple[complex, ...]
    step: complex
    kappa: Optional[complex] = None
    symmetric: bool = False

    @property
    def additive(self):
        return self.tag.additive

    def param(self, origin, offset=0):
        return UniformParam(self.tag, complex(origin), self.step, offset)

    @property
    def autonomous_origin(self):
        """nu = 1 or w = kappa: the fiber lambda = 0 where the chart is the Segre map."""
        return 1.0 + 0j if self.additive else self.kappa

    def autonomous(self):
        """Same configuration with delta = 0 / q = 1."""
        return replace(self, step=0j if self.additive else 1 + 0j)

    def with_step(self, step):
        return replace(self, step=complex(step))

    @property
    def q_inf(self):
        return q_infinity(self.tag, self.kappa)

    @property
    def pencil(self):
        return QuadricPencil(Q0, self.q_inf)


def base_points_2d(cfg):
    """The eight points s_i = (a_i, b_i) of the autonomous configuration (dD4: s_1..s_4 twice)."""
    k = cfg.kappa
    t = cfg.tag
    p = cfg.params
    if t is FamilyTag.dA1:
        return [(a, -a) for a in p[:4]] + [(a, 1 - a) for a in p[4:]]
    if t is FamilyTag.dD4:
        return [(a, -a) for a in p] * 2
    if t is FamilyTag.qA1:
        return [(k * c, k / c) for c in p[:4]] + [(c, 1 / c) for c in p[4:]]
    if t is FamilyTag.dA0:
        return [(z * (z + k), z * (z - k)) for z in p]
    return [(z + 1 / (k * z), 1 / z + z / k) for z in p]


def base_points(cfg):
    """The eight base points S_i in P^3 (on Q0 and Q_inf)."""
    return [
        segre_embed(ProjPoint1.from_affine(x), ProjPoint1.from_affine(y)) for x, y in base_points_2d(cfg)
    ]


def infinitely_near_directions(cfg):
    """Tangent directions of the infinitely near base points (dD4 only), in affine (x, y)."""
    if cfg.tag is FamilyTag.dD4:
        return [(1.0, 1.0)] * 4
    return []


def _check_constraint(tag, raw, kappa):
    exact = all(_is_exact(v) for v in raw) and (kappa is None or _is_exact(kappa))
    vals = [Fraction(v) for v in raw] if exact else [complex(v) for v in raw]
    if tag is FamilyTag.dA1:
        value = sum(vals[4:]) - sum(vals[:4])
        ok = value == 2 if exact else _close(value, 2, sum(abs(v) for v in vals))
        if not ok:
            raise ConstraintViolated(f"dA1 needs sum(a_5..a_8) - sum(a_1..a_4) = 2, got {value}")
    elif tag is FamilyTag.qA1:
        value = prod(vals[:4]) / prod(vals[4:])
        ok = value == 1 if exact else _close(value, 1, 1.0)
        if not ok:
            raise ConstraintViolated(f"qA1 needs prod(c_1..c_4) / prod(c_5..c_8) = 1, got {value}")
    elif tag is FamilyTag.dA0:
        value = sum(vals)
        ok = value == 0 if exact else _close(value, 0, sum(abs(v) for v in vals))
        if not ok:
            raise ConstraintViolated(f"dA0 needs sum(z_i) = 0, got {value}")
    elif tag is FamilyTag.qA0:
        value = prod(vals)
        ok = value == 1 if exact else _close(value, 1, 1.0)
        if not ok:
            raise ConstraintViolated(f"qA0 needs prod(z_i) = 1, got {value}")


def symmetry_defect(cfg):
    """Largest violation of the family's symmetry relations (0 for symmetric configs)."""
    p = cfg.params
    t = cfg.tag
    if t is FamilyTag.dA1:
        pairs = [(p[1], -p[0]), (p[3], -p[2]), (p[5], 1 - p[4]), (p[7], 1 - p[6])]
    elif t is FamilyTag.dD4:
        pairs = [(p[1], -p[0]), (p[3], -p[2])]
    elif t is FamilyTag.qA1:
        pairs = [(p[2 * i + 1], 1 / p[2 * i]) for i in range(4)]
    elif t is FamilyTag.dA0:
        pairs = [(p[i + 4], -p[i]) for i in range(4)]
    else:
        pairs = [(p[i + 4], 1 / p[i]) for i in range(4)]
    return max(abs(u - v) / max(1.0, abs(v)) for u, v in pairs)


def make_config(tag, params, step, kappa=None, symmetric=False):
    """Validate and build a FamilyConfig."""
    tag = FamilyTag(tag)
    raw = list(params)
    if len(raw) != N_PARAMS[tag.value]:
        raise ValueError(f"{tag.value} takes {N_PARAMS[tag.value]} parameters, got {len(raw)}")
    if tag.value in NEEDS_KAPPA:
        if kappa is None:
            raise ValueError(f"{tag.value} needs kappa")
        kc = complex(kappa)
        if kc == 0 or (tag is not FamilyTag.dA0 and abs(kc * kc - 1) < CONSTRAINT_TOL):
            raise DegenerateParameter(f"kappa = {kappa} is excluded for {tag.value}")
    elif kappa is not None:
        raise ValueError(f"{tag.value} takes no kappa")
    if tag in (FamilyTag.qA1, FamilyTag.qA0) and any(complex(v) == 0 for v in raw):
        raise DegenerateParameter("multiplicative parameters must be nonzero")
    step = complex(step)
    if not tag.additive and step == 0:
        raise DegenerateParameter("q must be nonzero")
    _check_constraint(tag, raw, kappa)

    cfg = FamilyConfig(
        tag,
        tuple(complex(v) for v in raw),
        step,
        None if kappa is None else complex(kappa),
        bool(symmetric),
    )
    pts = base_points_2d(cfg)
    distinct = pts[:4] if tag is FamilyTag.dD4 else pts
    for i in range(len(distinct)):
        for j in range(i):
            (x1, y1), (x2, y2) = distinct[i], distinct[j]
            if abs(x1 - x2) + abs(y1 - y2) <= CONSTRAINT_TOL * (1 + abs(x1) + abs(y1)):
                raise DegenerateParameter(f"base points {j + 1} and {i + 1} coincide")
    if symmetric and symmetry_defect(cfg) > CONSTRAINT_TOL:
        raise NotSymmetric(f"{tag.value} parameters do not satisfy the symmetry relations")
    return cfg


def require_symmetric(cfg):
    if symmetry_defect(cfg) > CONSTRAINT_TOL:
        raise NotSymmetric(f"{cfg.tag.value} parameters do not satisfy the symmetry relations")


def build_pencils(cfg, tol=1e-9):
    """The Q-pencil (Q0, Q_inf) and the lifted P-pencil (P0, P_inf) with P_inf = Q_inf."""
    pts = base_points_2d(cfg)
    if cfg.tag is FamilyTag.dD4:
        basis = biquadratic_space_through(
            [], tangents=list(zip(pts[:4], infinitely_near_directions(cfg))), tol=tol
        )
    else:
        basis = biquadratic_space_through(pts, tol=tol)
    if len(basis) != 2:
        raise LiftInconsistent(f"base points support a {len(basis)}-dimensional space of biquadratics, not a pencil")
    cinf = restrict_to_segre(cfg.q_inf).vector
    B = np.array([b.vector for b in basis]).T
    coef, *_ = np.linalg.lstsq(B, cinf, rcond=None)
    residual = np.linalg.norm(B @ coef - cinf) / np.linalg.norm(cinf)
    if residual > 1e-10:
        raise LiftInconsistent(f"C_inf is not in the biquadratic pencil (residual {residual:.2e})")
    # the member of the pencil orthogonal to C_inf
    u = cinf / np.linalg.norm(cinf)
    cands = [v - (u.conj() @ v) * u for v in B.T]
    c0 = max(cands, key=np.linalg.norm)
    c0 = c0 / c0[np.argmax(np.abs(c0))]
    p0 = segre_lift(BiquadraticForm(c0.reshape(3, 3)))
    return cfg.pencil, (p0, cfg.q_inf)


def mu_value(ppencil, X):
    """mu = P0(X) / P_inf(X)."""
    p0, pinf = ppencil
    return p0(X) / pinf(X)


def _rc(rng, scale=1.0):
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale) / 2)


def _kappa(rng):
    # |kappa| well away from 0 and 1
    return complex(rng.choice([-1, 1]) * rng.uniform(1.5, 3.0), rng.uniform(-0.3, 0.3))


def _log_size(c):
    return abs(np.log(c))


def _with_closing(draw, closing, size):
    """Free parameters plus the one fixed by the constraint, redrawn until it is on the same scale."""
    while True:
        a = draw()
        last = closing(a)
        if size(last) <= max(size(v) for v in a):
            return a + [last]


def random_config(tag, rng, symmetric=False):
    """A random admissible configuration with O(1) parameters (numpy Generator ``rng``)."""
    tag = FamilyTag(tag)
    kappa = None
    if tag is FamilyTag.dA1:
        if symmetric:
            a1, a3, a5, a7 = (_rc(rng, 0.5) for _ in range(4))
            a = [a1, -a1, a3, -a3, a5, 1 - a5, a7, 1 - a7]
        else:
            a = _with_closing(lambda: [_rc(rng) for _ in range(7)], lambda a: 2 + sum(a[:4]) - sum(a[4:7]), abs)
    elif tag is FamilyTag.dD4:
        if symmetric:
            a1, a3 = _rc(rng), _rc(rng)
            a = [a1, -a1, a3, -a3]
        else:
            a = [_rc(rng) for _ in range(4)]
    elif tag is FamilyTag.qA1:
        kappa = _kappa(rng)
        if symmetric:
            a = []
            for _ in range(4):
                c = np.exp(_rc(rng, 0.6))
                a += [c, 1 / c]
        else:
            a = _with_closing(lambda: [complex(np.exp(_rc(rng, 0.6))) for _ in range(7)],
                              lambda a: prod(a[:4]) / prod(a[4:7]), _log_size)
    elif tag is FamilyTag.dA0:
        kappa = _kappa(rng) / 2
        if symmetric:
            z = [_rc(rng) for _ in range(4)]
            a = z + [-v for v in z]
        else:
            a = _with_closing(lambda: [_rc(rng) for _ in range(7)], lambda a: -sum(a), abs)
    else:
        kappa = _kappa(rng)
        if symmetric:
            z = [complex(np.exp(_rc(rng, 0.6))) for _ in range(4)]
            a = z + [1 / v for v in z]
        else:
            a = _with_closing(lambda: [complex(np.exp(_rc(rng, 0.6))) for _ in range(7)],
                              lambda a: 1 / prod(a), _log_size)
    if tag.additive:
        step = complex(rng.uniform(0.1, 0.4) * rng.choice([-1, 1]), rng.uniform(-0.1, 0.1))
    else:
        step = complex(np.exp(complex(rng.uniform(0.05, 0.2) * rng.choice([-1, 1]), rng.uniform(-0.1, 0.1))))
    return make_config(tag, a, step, kappa=kappa, symmetric=symmetric)


def random_origin(cfg, rng):
    """A random position away from the chart-degenerate values."""
    if cfg.additive:
        return complex(rng.uniform(0.8, 1.6), rng.uniform(-0.4, 0.4))
    return complex(np.exp(complex(rng.uniform(0.2, 0.6), rng.uniform(-0.6, 0.6))))
