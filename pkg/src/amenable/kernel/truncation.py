from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..exactlin import CapExceeded, Matrix, Subspace, check_cap
from .element import AlgebraElement
from .families import Family


@dataclass(frozen=True, eq=False)
class Truncation:
    """All normal words of degree <= ``degree_bound``, in (degree, lex) order."""

    family: Family
    degree_bound: int
    basis: tuple
    index: dict = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    def vector(self, e: AlgebraElement) -> dict:
        """Coordinates of ``e``; raises KeyError for words outside the truncation."""
        try:
            return {self.index[w]: c for w, c in e.items()}
        except KeyError as exc:
            raise KeyError(f"word {self.family.format_word(exc.args[0])} outside degree {self.degree_bound}") from None

    def element(self, vec) -> AlgebraElement:
        return AlgebraElement(self.family, {self.basis[i]: c for i, c in vec.items()})

    def full(self) -> Subspace:
        return Subspace.full(self.size)

    def span(self, elements) -> Subspace:
        return Subspace.span((self.vector(e) for e in elements), self.size)

    def monomial_span(self, words) -> Subspace:
        return Subspace.coordinate((self.index[w] for w in words), self.size)

    def prefix(self, d: int) -> Subspace:
        """Truncation(d) as a coordinate subspace of this one."""
        return Subspace.coordinate(range(truncation(self.family, d).size), self.size)

    def subspace_elements(self, v: Subspace) -> list:
        return [self.element(r) for r in v.vectors]


@lru_cache(maxsize=256)
def truncation(family: Family, d: int) -> Truncation:
    if d < 0:
        raise ValueError("degree bound must be >= 0")
    check_cap(family.truncation_size(d), f"truncation {family}(d={d})")
    basis = tuple(family.words_up_to(d))
    return Truncation(family, d, basis, {w: i for i, w in enumerate(basis)})


def degree(a: AlgebraElement) -> int:
    return a.degree()


def as_operator(a: AlgebraElement, t: Truncation) -> tuple:
    """Left multiplication by ``a`` from ``t`` into the truncation of degree ``t.degree_bound + deg a``.

    Returns ``(matrix, target_truncation)``.
    """
    if a.family != t.family:
        raise ValueError(f"element of {a.family} on truncation of {t.family}")
    target = truncation(t.family, t.degree_bound + (a.degree() if a else 0))
    fam = t.family
    cols = []
    idx = target.index
    for w in t.basis:
        col: dict = {}
        for u, c in a.items():
            for x, k in fam.word_mul(u, w):
                j = idx[x]
                col[j] = col.get(j, 0) + c * k
        cols.append({j: v for j, v in col.items() if v})
    return Matrix(target.size, t.size, tuple(cols)), target


__all__ = ["Truncation", "truncation", "as_operator", "degree", "CapExceeded", "Fraction"]
