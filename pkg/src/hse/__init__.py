"""Higher special elements for complexes of group-ring modules."""

from .groupring import FiniteAbelianGroup, GroupRingElement, StructuralError
from .linalg import PreconditionError

__all__ = ["FiniteAbelianGroup", "GroupRingElement", "StructuralError", "PreconditionError"]
__version__ = "0.1.0"
