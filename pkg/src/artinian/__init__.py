"""Exact matrix groups over finite Artinian local rings."""

from .fields import FiniteField, finite_field
from .linalg import Matrix, SingularMatrixError
from .matgrp import GroupPattern
from .pointsets import PointSet, SizeGuardError
from .rings import LocalRing, NonUnitError, RingElement, RingSpecError, ring_make

__version__ = "0.1.0"

__all__ = [
    "FiniteField",
    "GroupPattern",
    "LocalRing",
    "Matrix",
    "NonUnitError",
    "PointSet",
    "RingElement",
    "RingSpecError",
    "SingularMatrixError",
    "SizeGuardError",
    "finite_field",
    "ring_make",
]
