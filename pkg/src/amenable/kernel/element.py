from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from ..exactlin import format_rational
from .families import Family


class FamilyMismatch(ValueError):
    pass


class AlgebraElement:
    """Finite rational combination of normal words; treat as immutable."""

    __slots__ = ("family", "_terms", "_hash")

    def __init__(self, family: Family, terms: Mapping | Iterable = ()):
        self.family = family
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            v = acc.get(w, 0) + Fraction(c)
            if v:
                acc[w] = v
            else:
                acc.pop(w, None)
        self._terms = acc
        self._hash = None

    @classmethod
    def _raw(cls, family, terms: dict) -> "AlgebraElement":
        e = cls.__new__(cls)
        e.family = family
        e._terms = terms
        e._hash = None
        return e

    @classmethod
    def word(cls, family: Family, w, coeff=1) -> "AlgebraElement":
        return cls(family, {w: coeff})

    @classmethod
    def scalar(cls, family: Family, c) -> "AlgebraElement":
        return cls(family, {family.one(): c})

    @classmethod
    def generator(cls, family: Family, name: str) -> "AlgebraElement":
        return cls.word(family, family.generator(name))

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def words(self):
        return self._terms.keys()

    def coefficient(self, w) -> Fraction:
        return self._terms.get(w, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of the zero element is undefined")
        return max(self.family.word_degree(w) for w in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            return AlgebraElement.scalar(self.family, other)
        if other.family != self.family:
            raise FamilyMismatch(f"{self.family} vs {other.family}")
        return other

    def __add__(self, other):
        other = self._check(other)
        acc = dict(self._terms)
        for w, c in other._terms.items():
            v = acc.get(w, 0) + c
            if v:
                acc[w] = v
            else:
                del acc[w]
        return AlgebraElement._raw(self.family, acc)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._raw(self.family, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c) -> "AlgebraElement":
        c = Fraction(c)
        if not c:
            return AlgebraElement._raw(self.family, {})
        return AlgebraElement._raw(self.family, {w: c * v for w, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = AlgebraElement.scalar(self.family, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def inverse(self) -> "AlgebraElement":
        """Inverse of a nonzero scalar multiple of a group word."""
        if not self.family.is_group:
            raise ValueError(f"negative exponents need a group algebra, not {self.family}")
        if len(self._terms) != 1:
            raise ValueError("only single group words are invertible here")
        (w, c), = self._terms.items()
        return AlgebraElement._raw(self.family, {self.family.inverse_word(w): 1 / c})

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.family == other.family and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == AlgebraElement.scalar(self.family, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.family, frozenset(self._terms.items())))
        return self._hash

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda t: self.family.sort_key(t[0]))

    def __str__(self):
        return serialize(self)

    def __repr__(self):
        return f"AlgebraElement({self.family.selector()}, {serialize(self)!r})"


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    if a.family != b.family:
        raise FamilyMismatch(f"{a.family} vs {b.family}")
    fam = a.family
    acc: dict = {}
    for u, cu in a.items():
        for v, cv in b.items():
            for w, k in fam.word_mul(u, v):
                acc[w] = acc.get(w, 0) + cu * cv * k
    return AlgebraElement._raw(fam, {w: c for w, c in acc.items() if c})


def serialize(e: AlgebraElement) -> str:
    if e.is_zero():
        return "0"
    one = e.family.one()
    out = []
    for w, c in e.sorted_terms():
        neg = c < 0
        mag = -c if neg else c
        if w == one:
            body = format_rational(mag)
        elif mag == 1:
            body = e.family.format_word(w)
        else:
            body = f"{format_rational(mag)}*{e.family.format_word(w)}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
