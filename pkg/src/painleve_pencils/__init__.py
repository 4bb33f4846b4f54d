"""Discrete Painleve equations as birational dynamics on pencils of quadrics in P^3."""
from .errors import PencilError
from .families import FamilyConfig, make_config, random_config
from .painleve_engine import initial_state, orbit, step, verify_recurrence
from .pencil_core import QuadricPencil, SymQuadForm, char_poly, classify_pencil
from .uniformization import FamilyTag, UniformParam

__all__ = [
    "FamilyConfig",
    "FamilyTag",
    "PencilError",
    "QuadricPencil",
    "SymQuadForm",
    "UniformParam",
    "char_poly",
    "classify_pencil",
    "initial_state",
    "make_config",
    "orbit",
    "random_config",
    "step",
    "verify_recurrence",
]
