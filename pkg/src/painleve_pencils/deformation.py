"""The deformation map L: Q_lambda(nu) -> Q_lambda(nu + 2 delta) fixing the base curve, and its half-step factors."""
from dataclasses import dataclass

import numpy as np

from .errors import CollapsedImage, OffPencilFiber
from .families import Q0
from .pencil_core import ProjPoint3
from .uniformization import FamilyTag, lambda_of, shift

FIBER_TOL = 1e-8


@dataclass(frozen=True)
class DeformationSpec:
    """v1 when Q_inf does not involve X3, v2 when it does not involve X1 (qA1)."""

    family: FamilyTag
    version: str
    step: complex


def deformation_spec(cfg):
    return DeformationSpec(cfg.tag, "v2" if cfg.tag is FamilyTag.qA1 else "v1", cfg.step)


def fiber_residual(cfg, p, X):
    """|Q_lambda(X)| relative to the size of its monomials."""
    X = np.asarray(getattr(X, "coords", X), dtype=complex)
    m = Q0.m - lambda_of(p, cfg.kappa) * cfg.q_inf.m
    scale = np.abs(X) @ np.abs(m) @ np.abs(X)
    return float(abs(X @ m @ X) / scale) if scale else 0.0


def L_homogeneous(cfg, p, X, check=True):
    """Image of X in Q_lambda(p) on Q_lambda(shift(p, 2))."""
    coords = np.asarray(getattr(X, "coords", X), dtype=complex)
    if check:
        res = fiber_residual(cfg, p, coords)
        if res > FIBER_TOL:
            raise OffPencilFiber(f"point is not on the fiber (relative residual {res:.2e})")
    dlam = lambda_of(shift(p, 2), cfg.kappa) - lambda_of(p, cfg.kappa)
    q = cfg.q_inf(coords)
    X1, X2, X3, X4 = coords
    if cfg.tag is FamilyTag.qA1:
        out = (X1 * X2 + dlam * q, X2 * X2, X2 * X3, X2 * X4)
    else:
        out = (X1 * X4, X2 * X4, X3 * X4 - dlam * q, X4 * X4)
    if max(abs(c) for c in out) <= 1e-14 * np.max(np.abs(coords)) ** 2:
        raise CollapsedImage("L sends the point to [0:0:0:0]")
    return ProjPoint3(out)


def L_chart(cfg, p, x, y):
    """L in pencil-adapted coordinates; returns (x^, y^, shift(p, 2))."""
    v, s, t = p.value, cfg.step, cfg.tag
    if t in (FamilyTag.dA1, FamilyTag.dD4):
        d = s / v * (x + y)
        xh, yh = x + d, y + d
    elif t is FamilyTag.dA0:
        d = s / v * (x - y)
        xh, yh = x + d, y - d
    elif t is FamilyTag.qA1:
        q2, w2 = s * s, v * v
        xh = (q2 * w2 - 1) / (w2 - 1) * x - (q2 - 1) * w2 / ((w2 - 1) * y)
        yh = 1 / ((q2 * w2 - 1) / (q2 * (w2 - 1)) / y - (q2 - 1) / (q2 * (w2 - 1)) * x)
    else:
        c = (1 - 1 / (s * s)) / (v * v - 1)
        xh, yh = x + c * (x - v * y), y + c * (y - v * x)
    return xh, yh, shift(p, 2)


FACTORS = ("L1", "R1", "L2", "R2")


def factor_map(cfg, p, x, y, which):
    """One half-step factor of L; L1/R1 change y, L2/R2 change x. Returns (x', y', shift(p, 1))."""
    if which not in FACTORS:
        raise ValueError(f"unknown factor {which!r}")
    v, s, t = p.value, cfg.step, cfg.tag
    changes_y = which in ("L1", "R1")
    if t in (FamilyTag.dA1, FamilyTag.dD4):
        d = s / v * (x + y)
        new = y + d if changes_y else x + d
    elif t is FamilyTag.dA0:
        new = y + s / v * (y - x) if changes_y else x + s / v * (x - y)
    elif t is FamilyTag.qA1:
        q2, w2 = s * s, v * v
        if changes_y:
            new = 1 / ((q2 * w2 - 1) / (q2 * (w2 - 1)) / y - (q2 - 1) / (q2 * (w2 - 1)) * x)
        else:
            new = (q2 * w2 - 1) / (w2 - 1) * x - (q2 - 1) * w2 / ((w2 - 1) * y)
    else:
        c = (1 - 1 / (s * s)) / (v * v - 1)
        qw = s * v if which in ("L1", "L2") else v
        new = y + c * (y - qw * x) if changes_y else x + c * (x - qw * y)
    if changes_y:
        return x, new, shift(p, 1)
    return new, y, shift(p, 1)


def factor_maps(cfg, p, x, y, which):
    """Apply a sequence of factors right to left, e.g. ``("L1", "R2")`` means L1 o R2."""
    for w in reversed(tuple(which)):
        x, y, p = factor_map(cfg, p, x, y, w)
    return x, y, p
