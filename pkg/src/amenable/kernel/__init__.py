"""Algebra families, elements, truncations and the expression parser."""

from .element import AlgebraElement, FamilyMismatch, multiply, serialize
from .families import (
    CommutativePoly,
    Family,
    FreeAssoc,
    FreeGroup,
    GroupFamily,
    Heisenberg3,
    Lattice,
    Quaternions,
    Weyl1,
    parse_family,
)
from .parse import ParseError, parse, parse_list
from .truncation import Truncation, as_operator, degree, truncation

__all__ = [
    "AlgebraElement", "FamilyMismatch", "multiply", "serialize", "CommutativePoly", "Family",
    "FreeAssoc", "FreeGroup", "GroupFamily", "Heisenberg3", "Lattice", "Quaternions", "Weyl1",
    "parse_family", "ParseError", "parse", "parse_list", "Truncation", "as_operator", "degree",
    "truncation",
]
