"""Finite-rank normalized traces on truncated regular representations.

``phi_n(A) = Tr(P_n A P_n) / dim W_n`` where ``W_n`` is spanned by the
delta functions of a ball ``B_n``. Only diagonal data of the test
operators is needed, so everything reduces to sums over group elements.

Translation convention: ``(g f)(delta) = f(g^{-1} delta)``, so
``g ∘ T_f ∘ g^{-1} = T_{g f}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .kernel import AlgebraElement, FreeGroup, GroupFamily, Heisenberg3, Lattice, parse
from .kernel.families import HEIS_BALL

TRACE_CAP = 200_000


def ball_words(group: GroupFamily, n: int) -> list:
    if group.truncation_size(n) > TRACE_CAP:
        raise ValueError(f"ball of radius {n} in {group} exceeds {TRACE_CAP} elements")
    if isinstance(group, Heisenberg3):
        HEIS_BALL.grow_to(n)
    return group.words_up_to(n)


def gmul(group: GroupFamily, u, v):
    ((w, _),) = group.word_mul(u, v)
    return w


@dataclass(eq=False)
class TruncatedRep:
    group: GroupFamily
    level: int
    basis: list = field(init=False)
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.group, GroupFamily):
            raise TypeError("truncated representations need a group family")
        self.basis = ball_words(self.group, self.level)
        self.index = {w: i for i, w in enumerate(self.basis)}
        self._tables = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def action(self, g) -> list:
        """Partial table of ``w -> g w``: basis index, or -1 when it leaves the ball."""
        if g not in self._tables:
            self._tables[g] = [self.index.get(gmul(self.group, g, w), -1) for w in self.basis]
        return self._tables[g]

    def overlap_size(self, g) -> int:
        """``|G_n|`` with ``G_n = g^{-1}(g W_n ∩ W_n)``."""
        return sum(1 for j in self.action(g) if j >= 0)


# -- test operators ----------------------------------------------------------

@dataclass(frozen=True)
class Multiplication:
    """``T_f`` for a named bounded function, evaluated as ``f(shift * delta)``."""

    kind: str  # "prefix" | "parity" | "const"
    arg: object
    group: GroupFamily
    shift: object = None

    @property
    def norm_bound(self) -> float:
        return abs(float(self.arg)) if self.kind == "const" else 1.0

    def _base(self, w) -> float:
        if self.kind == "const":
            return float(self.arg)
        if self.kind == "parity":
            return 1.0 if w[self.arg] % 2 == 0 else 0.0
        p = self.arg
        return 1.0 if w[: len(p)] == p else 0.0

    def diag(self, w) -> float:
        if self.shift is not None:
            w = gmul(self.group, self.shift, w)
        return self._base(w)

    def conjugate(self, g) -> "Multiplication":
        """``g T_f g^{-1} = T_{g f}``."""
        ginv = self.group.inverse_word(g)
        shift = ginv if self.shift is None else gmul(self.group, self.shift, ginv)
        return Multiplication(self.kind, self.arg, self.group, shift)


@dataclass(frozen=True)
class Convolution:
    """Left convolution by a group-algebra element; diagonal entries equal its identity coefficient."""

    by: AlgebraElement

    @property
    def norm_bound(self) -> float:
        return float(sum(abs(c) for _, c in self.by.items()))

    def diag(self, w) -> float:
        return float(self.by.coefficient(self.by.family.one()))

    def conjugate(self, g) -> "Convolution":
        fam = self.by.family
        gw = AlgebraElement.word(fam, g)
        return Convolution(gw * self.by * AlgebraElement.word(fam, fam.inverse_word(g)))


def identity_operator(group) -> Multiplication:
    return Multiplication("const", 1, group)


def prefix_indicator(group: FreeGroup, prefix: str) -> Multiplication:
    e = parse(group, prefix)
    if len(e) != 1 or e.coefficient(next(iter(e.words()))) != 1:
        raise ValueError("prefix must be a single group word")
    return Multiplication("prefix", next(iter(e.words())), group)


def parity_indicator(group, coord: int) -> Multiplication:
    if isinstance(group, FreeGroup):
        raise ValueError("parity operators need coordinates (lattice or Heisenberg)")
    width = group.rank if isinstance(group, Lattice) else 3
    if not 0 <= coord < width:
        raise ValueError(f"coordinate {coord} out of range")
    return Multiplication("parity", coord, group)


def parse_operator(group, spec: str):
    kind, _, arg = spec.partition(":")
    if kind == "prefix":
        if not isinstance(group, FreeGroup):
            raise ValueError("prefix operators need a free group")
        return prefix_indicator(group, arg)
    if kind == "parity":
        return parity_indicator(group, int(arg or 0))
    if kind == "conv":
        return Convolution(parse(group, arg))
    if kind in ("id", "const"):
        return Multiplication("const", Fraction(arg) if arg else 1, group)
    raise ValueError(f"unknown operator {spec!r}")


# -- traces ------------------------------------------------------------------

def _trace(rep: TruncatedRep, A, words) -> float:
    return math.fsum(A.diag(w) for w in words)


def phi(rep: TruncatedRep, A) -> float:
    return _trace(rep, A, rep.basis) / rep.dim


def invariance_gap(rep: TruncatedRep, A, g) -> float:
    """``|phi_n(A) - phi_n(g A g^{-1})|``."""
    return abs(phi(rep, A) - phi(rep, A.conjugate(g)))


def unitary_completion(rep: TruncatedRep, g) -> list:
    """Permutation of the ball agreeing with ``g`` wherever ``g w`` stays inside.

    Unmatched sources are paired with unmatched targets in basis order.
    """
    act = rep.action(g)
    hit = set(j for j in act if j >= 0)
    free_targets = iter(j for j in range(rep.dim) if j not in hit)
    return [j if j >= 0 else next(free_targets) for j in act]


@dataclass(frozen=True)
class BoundaryReport:
    """Trace of ``A`` against its conjugates by ``g`` and by the unitary completion ``g_n``."""

    level: int
    dim: int
    l_n: int
    trace_A: float
    trace_unitary: float  # Tr(P g_n^{-1} A g_n P)
    trace_conjugated: float  # Tr(P g^{-1} A g P)
    bound: float

    @property
    def completion_error(self) -> float:
        """``|Tr(P g_n^{-1} A g_n P) - Tr(P A P)|``; zero up to rounding since ``g_n`` permutes the ball."""
        return abs(self.trace_unitary - self.trace_A)

    @property
    def difference(self) -> float:
        return abs(self.trace_unitary - self.trace_conjugated)

    @property
    def holds(self) -> bool:
        return self.difference <= self.bound + 1e-9 * max(1, self.dim)

    @property
    def boundary_fraction(self) -> float:
        return self.l_n / self.dim


def boundary_bound_check(rep: TruncatedRep, A, g) -> BoundaryReport:
    perm = unitary_completion(rep, g)
    gw = [gmul(rep.group, g, w) for w in rep.basis]
    l_n = rep.dim - rep.overlap_size(g)
    return BoundaryReport(
        level=rep.level,
        dim=rep.dim,
        l_n=l_n,
        trace_A=_trace(rep, A, rep.basis),
        trace_unitary=_trace(rep, A, [rep.basis[j] for j in perm]),
        trace_conjugated=_trace(rep, A, gw),
        bound=2 * A.norm_bound * l_n,
    )


TRACE_HEADER = ("n", "phi_A", "phi_conj", "gap", "l_n", "dim", "bound")


def trace_rows(group, A, g, n_max: int, n_min: int = 0) -> list:
    rows = []
    for n in range(n_min, n_max + 1):
        rep = TruncatedRep(group, n)
        pa = phi(rep, A)
        pc = phi(rep, A.conjugate(g))
        chk = boundary_bound_check(rep, A, g)
        rows.append((n, pa, pc, abs(pa - pc), chk.l_n, rep.dim, chk.bound))
    return rows


def tail_extremes(values) -> tuple:
    """(min, max) over the second half of a finite sequence; stands in for lim inf / lim sup."""
    tail = list(values)[len(values) // 2:]
    return (min(tail), max(tail)) if tail else (None, None)
