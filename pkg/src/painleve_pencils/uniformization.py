"""Uniformizing coordinates nu (additive) and w (multiplicative) for the pencil parameter lambda."""
from dataclasses import dataclass, replace
from enum import Enum

from .errors import BranchPole


class FamilyTag(str, Enum):
    dA1 = "dA1"
    dD4 = "dD4"
    qA1 = "qA1"
    dA0 = "dA0"
    qA0 = "qA0"

    @property
    def additive(self):
        return self in (FamilyTag.dA1, FamilyTag.dD4, FamilyTag.dA0)

    @property
    def pencil_type(self):
        return {"dA1": "v", "dD4": "vi", "qA1": "iv", "dA0": "iii", "qA0": "ii"}[self.value]


@dataclass(frozen=True)
class UniformParam:
    """Position ``origin + offset*step`` (additive) or ``origin * step**offset`` (multiplicative).

    The offset counts half-steps; keeping it as an integer makes ``shift`` compose exactly.
    """

    family: FamilyTag
    origin: complex
    step: complex
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", FamilyTag(self.family))
        if not self.family.additive:
            if self.step == 0:
                raise ValueError("multiplicative step q must be nonzero")
            if self.origin == 0:
                raise BranchPole("w = 0 is a pole of the uniformization")

    @property
    def kind(self):
        return "additive" if self.family.additive else "multiplicative"

    @property
    def value(self):
        if self.family.additive:
            return self.origin + self.offset * self.step
        return self.origin * self.step ** self.offset


def shift(p, half_steps):
    """Move ``half_steps`` half-steps: nu -> nu + k*delta or w -> w*q**k."""
    return replace(p, offset=p.offset + int(half_steps))


def _check_kappa(kappa):
    if kappa is None or kappa == 0 or kappa * kappa == 1:
        raise BranchPole(f"kappa = {kappa!r} makes the multiplicative uniformization singular")


def lambda_at(family, value, kappa=None):
    """lambda as a function of the raw uniformizing value nu or w."""
    family = FamilyTag(family)
    if family in (FamilyTag.dA1, FamilyTag.dD4):
        return (1 - value * value) / 4
    if family is FamilyTag.dA0:
        return (value * value - 1) / 4
    _check_kappa(kappa)
    if value == 0:
        raise BranchPole("w = 0 is a pole of lambda(w)")
    return (kappa - value) * (1 - kappa * value) / ((1 - kappa * kappa) ** 2 * value)


def sqrt_delta_at(family, value, kappa=None):
    family = FamilyTag(family)
    if family.additive:
        return value
    _check_kappa(kappa)
    if value == 0:
        raise BranchPole("w = 0 is a pole of sqrt(Delta)")
    return kappa * (1 - value * value) / (value * (1 - kappa * kappa))


def lambda_of(p, kappa=None):
    return lambda_at(p.family, p.value, kappa)


def sqrt_delta_of(p, kappa=None):
    return sqrt_delta_at(p.family, p.value, kappa)


def deck_involution_check(p, kappa=None):
    """|lambda(v) - lambda(v')| + |sqrtDelta(v) + sqrtDelta(v')| with v' = -nu or 1/w."""
    v = p.value
    other = -v if p.family.additive else 1 / v
    return abs(lambda_at(p.family, v, kappa) - lambda_at(p.family, other, kappa)) + abs(
        sqrt_delta_at(p.family, v, kappa) + sqrt_delta_at(p.family, other, kappa)
    )
