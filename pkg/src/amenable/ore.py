"""Common multiples ``a*u = b*v != 0``, searched degree by degree.

The default side looks for right multipliers, i.e. a nonzero element of
``aA ∩ bA``. That is the formula usually called the right Ore condition;
``side="left"`` searches ``Aa ∩ Ab`` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .artifacts import SCHEMA_VERSION
from .exactlin import Echelon, Subspace, intersect, kernel_tags
from .foelner import image_sum, left_mul_vector
from .kernel import AlgebraElement, Truncation, serialize, truncation


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class OreSolution:
    u: AlgebraElement
    v: AlgebraElement
    common: AlgebraElement
    degree: int
    side: str = "right"

    def to_json(self, a, b) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": "ore_outcome", "status": "solution",
                "algebra": a.family.selector(), "a": serialize(a), "b": serialize(b), "side": self.side,
                "degree": self.degree, "u": serialize(self.u), "v": serialize(self.v),
                "common": serialize(self.common)}


@dataclass(frozen=True)
class ExhaustedUpTo:
    degree: int
    side: str = "right"

    def to_json(self, a, b) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": "ore_outcome", "status": "exhausted",
                "algebra": a.family.selector(), "a": serialize(a), "b": serialize(b), "side": self.side,
                "degree": self.degree}


def _mul(x, y, side):
    return x * y if side == "right" else y * x


def primitive(vec: dict) -> dict:
    """Scale to integer entries with content 1 and a positive leading entry."""
    den = math.lcm(*(q.denominator for q in vec.values()))
    ints = {i: int(q * den) for i, q in vec.items()}
    g = math.gcd(*ints.values())
    if ints[min(ints)] < 0:
        g = -g
    return {i: Fraction(x // g) for i, x in ints.items()}


def ore_solve(a: AlgebraElement, b: AlgebraElement, d_max: int, side: str = "right"):
    """Search ``a*u = b*v != 0`` over ``u, v`` of degree ``0..d_max``.

    The first degree with a nonzero kernel wins; the reported pair is the
    first row of that kernel's canonical basis, made primitive.
    """
    if not a or not b:
        raise ValueError("ore_solve needs nonzero a and b")
    if a.family != b.family:
        raise ValueError("a and b must lie in one family")
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    fam = a.family
    for d in range(d_max + 1):
        t = truncation(fam, d)
        target = truncation(fam, d + max(a.degree(), b.degree()))
        cols = []
        for i in range(t.size):
            w = AlgebraElement.word(fam, t.basis[i])
            cols.append(target.vector(_mul(a, w, side)))
        for i in range(t.size):
            w = AlgebraElement.word(fam, t.basis[i])
            cols.append(target.vector(-_mul(b, w, side)))
        ker = kernel_tags(cols, target.size)
        if not ker:
            continue
        first = primitive(dict(Subspace.span(ker, 2 * t.size).rows[0]))
        u = t.element({i: c for i, c in first.items() if i < t.size})
        v = t.element({i - t.size: c for i, c in first.items() if i >= t.size})
        common = _mul(a, u, side)
        if not common:
            continue  # zero divisor pair; impossible in a domain
        if common != _mul(b, v, side):
            raise InvariantViolation("kernel vector failed re-multiplication")
        return OreSolution(u, v, common, d, side)
    return ExhaustedUpTo(d_max, side)


@dataclass(frozen=True)
class Overlap:
    a_overlap: Fraction
    b_overlap: Fraction
    dim_W: int
    dim_aW_W: int
    dim_bW_W: int
    dim_aW_bW: int


def overlap(a: AlgebraElement, b: AlgebraElement, W: Subspace, t: Truncation) -> Overlap:
    """Exact ``dim(aW ∩ W)/dim W`` and ``dim(bW ∩ W)/dim W``.

    When both exceed 1/2 the Grassmann bound forces ``aW ∩ bW != 0``; that
    is checked on every call.
    """
    if not a or not b:
        raise ValueError("overlap needs nonzero a and b")
    if W.dim == 0:
        raise ValueError("W must be nonzero")
    aW, ta = image_sum([a], W, t)
    bW, tb = image_sum([b], W, t)
    n = max(ta.size, tb.size)
    aW, bW, Wb = aW.embed(n), bW.embed(n), W.embed(n)
    da = intersect(aW, Wb).dim
    db = intersect(bW, Wb).dim
    dab = intersect(aW, bW).dim
    if dab < da + db - W.dim:
        raise InvariantViolation("dim(aW ∩ bW) below the Grassmann bound")
    ra, rb = Fraction(da, W.dim), Fraction(db, W.dim)
    if ra > Fraction(1, 2) and rb > Fraction(1, 2) and dab == 0:
        raise InvariantViolation("both overlaps exceed 1/2 but aW ∩ bW = 0")
    return Overlap(ra, rb, W.dim, da, db, dab)


def overlap_ratio(a, b, W, t) -> tuple:
    o = overlap(a, b, W, t)
    return o.a_overlap, o.b_overlap


__all__ = ["OreSolution", "ExhaustedUpTo", "ore_solve", "overlap", "overlap_ratio", "InvariantViolation",
           "left_mul_vector", "Echelon"]
