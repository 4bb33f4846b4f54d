"""Projective points, quadratic forms, pencils of quadrics and the Segre embedding.

Quadratic forms are stored through their Hessian matrix ``m``, so that
``Q(X) = X^T m X / 2``.  With this convention the Segre quadric
``X1 X2 - X3 X4`` has a matrix of determinant 1 and ``det(M0 - lam Minf)``
is the characteristic polynomial of the pencil.
"""
from dataclasses import dataclass
from itertools import permutations
from typing import List, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from .errors import UnrecognizedProfile

DEFAULT_TOL = 1e-9


def _canonical(coords):
    v = np.asarray(coords, dtype=complex).ravel()
    mods = np.abs(v)
    if not np.any(mods > 0) or not np.all(np.isfinite(v)):
        raise ValueError(f"not a valid homogeneous point: {coords!r}")
    k = int(np.argmax(mods))  # first maximum: ties go to the lowest index
    out = v / v[k]
    out[k] = 1.0
    return tuple(complex(c) for c in out)


@dataclass(frozen=True)
class ProjPoint3:
    """Point [X1:X2:X3:X4] of P^3, stored with its max-modulus coordinate equal to 1."""

    coords: Tuple[complex, complex, complex, complex]

    def __post_init__(self):
        if len(self.coords) != 4:
            raise ValueError("ProjPoint3 needs 4 coordinates")
        object.__setattr__(self, "coords", _canonical(self.coords))

    @property
    def array(self):
        return np.array(self.coords, dtype=complex)


@dataclass(frozen=True)
class ProjPoint1:
    """Point (u:v) of P^1; the affine coordinate is u/v."""

    coords: Tuple[complex, complex]

    def __post_init__(self):
        if len(self.coords) != 2:
            raise ValueError("ProjPoint1 needs 2 coordinates")
        object.__setattr__(self, "coords", _canonical(self.coords))

    @classmethod
    def from_affine(cls, x):
        x = complex(x)
        if np.isinf(x.real) or np.isinf(x.imag):
            return cls((1, 0))
        return cls((x, 1))

    @property
    def is_infinite(self):
        return self.coords[1] == 0

    @property
    def affine(self):
        u, v = self.coords
        if v == 0:
            return complex("inf")
        return u / v


def projective_distance(u, v):
    """Chordal (sine of the Fubini-Study angle) distance between two homogeneous vectors.

    Computed from the 2x2 minors so that nearby points lose no accuracy.
    """
    a = np.asarray(getattr(u, "coords", u), dtype=complex).ravel()
    b = np.asarray(getattr(v, "coords", v), dtype=complex).ravel()
    minors = np.outer(a, b) - np.outer(b, a)
    return float(np.sqrt(np.sum(np.abs(minors) ** 2) / 2) / (np.linalg.norm(a) * np.linalg.norm(b)))


@dataclass(frozen=True, eq=False)
class SymQuadForm:
    """Quadratic form on C^4 given by its symmetric Hessian matrix."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("quadratic form needs a 4x4 matrix")
        if not np.array_equal(m, m.T):
            raise ValueError("matrix is not symmetric")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    @classmethod
    def from_monomials(cls, coeffs):
        """Build from ``{(i, j): c}`` meaning ``c * X_{i+1} X_{j+1}`` (0-based, i <= j)."""
        m = np.zeros((4, 4), dtype=complex)
        for (i, j), c in coeffs.items():
            if i == j:
                m[i, i] += 2 * c
            else:
                m[i, j] += c
                m[j, i] += c
        return cls(m)

    def __call__(self, X):
        X = np.asarray(getattr(X, "coords", X), dtype=complex)
        return complex(X @ self.m @ X) / 2

    def upper(self):
        """Coefficients of the 10 monomials X_i X_j, i <= j, in row-major order."""
        iu = np.triu_indices(4)
        vec = self.m[iu].copy()
        vec[iu[0] == iu[1]] /= 2
        return vec

    def __add__(self, other):
        return SymQuadForm(self.m + other.m)

    def __sub__(self, other):
        return SymQuadForm(self.m - other.m)

    def __mul__(self, s):
        return SymQuadForm(self.m * s)

    __rmul__ = __mul__

    def __repr__(self):
        return f"SymQuadForm({self.m.tolist()!r})"


def eval_quadric(q, p):
    """Value of the quadratic form at the canonical representative of ``p``."""
    return q(p)


@dataclass(frozen=True, eq=False)
class QuadricPencil:
    """Pencil Q_lam = Q0 - lam * Qinf."""

    m0: SymQuadForm
    minf: SymQuadForm

    def __post_init__(self):
        a, b = self.m0.upper(), self.minf.upper()
        s = np.linalg.svd(np.vstack([a, b]), compute_uv=False)
        if s[1] <= 1e-12 * s[0]:
            raise ValueError("the two forms of a pencil must be linearly independent")

    def member(self, lam):
        return SymQuadForm(self.m0.m - lam * self.minf.m)


@dataclass(frozen=True, eq=False)
class BiquadraticForm:
    """Curve sum c[j][k] x^j y^k of bidegree (2, 2)."""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=complex)
        if c.shape != (3, 3):
            raise ValueError("biquadratic form needs a 3x3 coefficient matrix")
        if not np.any(c):
            raise ValueError("biquadratic form is identically zero")
        c.flags.writeable = False
        object.__setattr__(self, "c", c)

    def __call__(self, x, y):
        return sum(self.c[j, k] * x ** j * y ** k for j in range(3) for k in range(3))

    @property
    def vector(self):
        return self.c.ravel().copy()


@dataclass(frozen=True)
class PencilType:
    tag: str
    segre: str
    root_data: tuple  # ((lam or None for infinity, multiplicity, corank), ...)

    def __post_init__(self):
        if sum(r[1] for r in self.root_data) != 4:
            raise ValueError("root multiplicities must sum to 4")


def char_poly(pencil):
    """det(M0 - lam Minf) as a Polynomial in lam, by permutation expansion over linear entries."""
    entries = [[(pencil.m0.m[i, j], -pencil.minf.m[i, j]) for j in range(4)] for i in range(4)]
    total = np.zeros(5, dtype=complex)
    for perm in permutations(range(4)):
        sign = np.linalg.det(np.eye(4)[list(perm)])
        term = np.array([1.0 + 0j])
        for i, j in enumerate(perm):
            term = np.convolve(term, entries[i][j])
        total[: len(term)] += round(sign) * term
    return Polynomial(total)


_PROFILES = {
    ((1, 1), (1, 1), (1, 1), (1, 1)): ("i", "[1,1,1,1]"),
    ((1, 1), (1, 1), (2, 1)): ("ii", "[2,1,1]"),
    ((1, 1), (3, 1)): ("iii", "[3,1]"),
    ((1, 1), (1, 1), (2, 2)): ("iv", "[(1,1),1,1]"),
    ((1, 1), (3, 2)): ("v", "[(2,1),1]"),
    ((1, 1), (3, 3)): ("vi", "[(1,1,1),1]"),
}


def _corank(m, tol):
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s <= tol * max(s[0], 1.0)))


def classify_pencil(pencil, tol=DEFAULT_TOL):
    """Pencil type from the roots of the homogenized Delta and the coranks there."""
    coef = char_poly(pencil).coef
    scale = np.max(np.abs(coef))
    if scale == 0:
        raise UnrecognizedProfile("characteristic polynomial vanishes identically")
    nz = np.nonzero(np.abs(coef) > tol * scale)[0]
    deg = int(nz[-1])
    roots = np.roots(coef[: deg + 1][::-1]) if deg > 0 else np.array([])
    # a root of multiplicity m moves by ~eps**(1/m) under a relative perturbation eps
    radius = tol ** 0.25
    clusters: List[List[complex]] = []
    for r in roots:
        for cl in clusters:
            centre = np.mean(cl)
            if abs(r - centre) <= radius * (1 + abs(centre)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    data = []
    for cl in clusters:
        lam = complex(np.mean(cl))
        data.append((lam, len(cl), _corank(pencil.member(lam).m, tol)))
    if deg < 4:
        data.append((None, 4 - deg, _corank(pencil.minf.m, tol)))
    profile = tuple(sorted((mult, cork) for _, mult, cork in data))
    if profile not in _PROFILES:
        raise UnrecognizedProfile(f"root profile {profile} is not one of the supported pencil types")
    tag, segre = _PROFILES[profile]
    return PencilType(tag, segre, tuple(data))


def segre_embed(x, y):
    """(x, y) -> [x : y : xy : 1], homogeneously."""
    ux, vx = x.coords
    uy, vy = y.coords
    return ProjPoint3((ux * vy, vx * uy, ux * uy, vx * vy))


# monomial x^j y^k -> index pair of X_a X_b (0-based)
SEGRE_DICTIONARY = {
    (0, 0): (3, 3),
    (1, 0): (0, 3),
    (0, 1): (1, 3),
    (1, 1): (2, 3),
    (2, 0): (0, 0),
    (0, 2): (1, 1),
    (2, 1): (0, 2),
    (1, 2): (1, 2),
    (2, 2): (2, 2),
}


def segre_lift(c):
    """Quadric whose restriction to the Segre quadric pulls back to the biquadratic ``c``."""
    coeffs = {}
    for (j, k), ab in SEGRE_DICTIONARY.items():
        coeffs[ab] = coeffs.get(ab, 0) + c.c[j, k]
    return SymQuadForm.from_monomials(coeffs)


def restrict_to_segre(q):
    """Biquadratic form q(x, y, xy, 1); inverse of ``segre_lift`` modulo Q0."""
    c = np.zeros((3, 3), dtype=complex)
    upper = q.upper()
    iu = np.triu_indices(4)
    for (a, b), coef in zip(zip(*iu), upper):
        # X1 -> x, X2 -> y, X3 -> xy, X4 -> 1 as exponent pairs
        powers = [(1, 0), (0, 1), (1, 1), (0, 0)]
        j = powers[a][0] + powers[b][0]
        k = powers[a][1] + powers[b][1]
        c[j, k] += coef
    return BiquadraticForm(c)


def _monomials_xy(x, y):
    return np.array([x ** j * y ** k for j in range(3) for k in range(3)], dtype=complex)


def _monomials_xy_derivative(x, y, dx, dy):
    out = []
    for j in range(3):
        for k in range(3):
            d = 0j
            if j:
                d += j * x ** (j - 1) * y ** k * dx
            if k:
                d += k * x ** j * y ** (k - 1) * dy
            out.append(d)
    return np.array(out, dtype=complex)


def _nullspace(rows, ncols, tol):
    if not rows:
        return np.eye(ncols, dtype=complex)
    a = np.array(rows, dtype=complex)
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return vh[rank:].conj()


def biquadratic_space_through(points, tangents=(), tol=DEFAULT_TOL):
    """Basis of the biquadratic curves through affine ``points``.

    ``tangents`` is a sequence of ``((x, y), (dx, dy))`` requiring the curve to pass
    through (x, y) with tangent direction (dx, dy) (an infinitely near point).
    """
    rows = [_monomials_xy(x, y) for x, y in points]
    for (x, y), (dx, dy) in tangents:
        rows.append(_monomials_xy(x, y))
        rows.append(_monomials_xy_derivative(x, y, dx, dy))
    basis = _nullspace(rows, 9, tol)
    return [BiquadraticForm(v.reshape(3, 3)) for v in basis]


def _quadric_monomials(X):
    X = np.asarray(X, dtype=complex)
    iu = np.triu_indices(4)
    return X[iu[0]] * X[iu[1]]


def _quadric_monomials_derivative(X, dX):
    X = np.asarray(X, dtype=complex)
    dX = np.asarray(dX, dtype=complex)
    iu = np.triu_indices(4)
    return X[iu[0]] * dX[iu[1]] + dX[iu[0]] * X[iu[1]]


def quadric_space_dim_through(points, tol=DEFAULT_TOL, jets=()):
    """Dimension of the space of quadrics through ``points``.

    ``jets`` is a sequence of ``(X, dX)`` pairs: the quadric must pass through X and be
    tangent to the direction dX there.
    """
    rows = [_quadric_monomials(getattr(p, "coords", p)) for p in points]
    for X, dX in jets:
        rows.append(_quadric_monomials(X))
        rows.append(_quadric_monomials_derivative(X, dX))
    return int(_nullspace(rows, 10, tol).shape[0])
