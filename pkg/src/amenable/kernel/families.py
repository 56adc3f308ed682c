"""Algebra families with terminating normal forms.

Each family fixes a hashable word type, a word product (returning a list
of ``(word, int)`` terms), a degree, and a degree-then-lexicographic sort
key. Truncations are prefixes of that order, which lets subspaces of a
smaller truncation be reused verbatim inside a larger one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, factorial

from ..exactlin import AMBIENT_CAP, CapExceeded


def default_names(n: int) -> tuple:
    if n <= 3:
        return tuple("xyz"[:n])
    return tuple(f"x{i + 1}" for i in range(n))


def _power(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def _join(parts) -> str:
    return "*".join(parts) if parts else "1"


class Family:
    """Shared interface; concrete families are frozen dataclasses."""

    is_group = False
    generator_names: tuple = ()

    def selector(self) -> str:
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def word_mul(self, u, v) -> list:
        raise NotImplementedError

    def word_degree(self, w) -> int:
        raise NotImplementedError

    def sort_key(self, w):
        raise NotImplementedError

    def truncation_size(self, d: int) -> int:
        raise NotImplementedError

    def words_up_to(self, d: int) -> list:
        raise NotImplementedError

    def format_word(self, w) -> str:
        raise NotImplementedError

    def generator(self, name: str):
        """Word for a generator name; KeyError if unknown."""
        return self._gens()[name]

    def inverse_word(self, w):
        raise TypeError(f"{self.selector()} has no inverses")

    def _gens(self) -> dict:
        raise NotImplementedError

    def __str__(self):
        return self.selector()


@dataclass(frozen=True)
class FreeAssoc(Family):
    generator_names: tuple = ("x", "y")

    def __post_init__(self):
        _check_names(self.generator_names)

    def selector(self):
        if self.generator_names == default_names(len(self.generator_names)):
            return f"free:{len(self.generator_names)}"
        return "free:" + ",".join(self.generator_names)

    def one(self):
        return ()

    def word_mul(self, u, v):
        return [(u + v, 1)]

    def word_degree(self, w):
        return len(w)

    def sort_key(self, w):
        return (len(w), w)

    def truncation_size(self, d):
        n = len(self.generator_names)
        return d + 1 if n == 1 else (n ** (d + 1) - 1) // (n - 1)

    def words_up_to(self, d):
        n = len(self.generator_names)
        out = []
        for length in range(d + 1):
            out.extend(itertools.product(range(n), repeat=length))
        return out

    def format_word(self, w):
        parts = []
        for g, run in itertools.groupby(w):
            parts.append(_power(self.generator_names[g], len(list(run))))
        return _join(parts)

    def _gens(self):
        return {name: (i,) for i, name in enumerate(self.generator_names)}


@dataclass(frozen=True)
class CommutativePoly(Family):
    generator_names: tuple = ("x", "y")

    def __post_init__(self):
        _check_names(self.generator_names)

    def selector(self):
        if self.generator_names == default_names(len(self.generator_names)):
            return f"poly:{len(self.generator_names)}"
        return "poly:" + ",".join(self.generator_names)

    def one(self):
        return (0,) * len(self.generator_names)

    def word_mul(self, u, v):
        return [(tuple(a + b for a, b in zip(u, v)), 1)]

    def word_degree(self, w):
        return sum(w)

    def sort_key(self, w):
        return (sum(w), tuple(-e for e in w))

    def truncation_size(self, d):
        n = len(self.generator_names)
        return comb(d + n, n)

    def words_up_to(self, d):
        n = len(self.generator_names)
        out = [w for w in itertools.product(range(d + 1), repeat=n) if sum(w) <= d]
        out.sort(key=self.sort_key)
        return out

    def format_word(self, w):
        return _join([_power(self.generator_names[i], e) for i, e in enumerate(w) if e])

    def _gens(self):
        n = len(self.generator_names)
        return {name: tuple(int(i == k) for i in range(n)) for k, name in enumerate(self.generator_names)}


@dataclass(frozen=True)
class Weyl1(Family):
    """First Weyl algebra, ``y*x = x*y + 1``; words ``(i, j)`` mean ``x^i y^j``."""

    generator_names: tuple = ("x", "y")

    def selector(self):
        return "weyl"

    def one(self):
        return (0, 0)

    def word_mul(self, u, v):
        # y^b x^c = sum_k C(b,k) c!/(c-k)! x^(c-k) y^(b-k)
        a, b = u
        c, d = v
        if b == 0 or c == 0:
            return [((a + c, b + d), 1)]
        return [
            ((a + c - k, b + d - k), comb(b, k) * factorial(c) // factorial(c - k))
            for k in range(min(b, c) + 1)
        ]

    def word_degree(self, w):
        return w[0] + w[1]

    def sort_key(self, w):
        return (w[0] + w[1], -w[0])

    def truncation_size(self, d):
        return (d + 1) * (d + 2) // 2

    def words_up_to(self, d):
        return [(i, n - i) for n in range(d + 1) for i in range(n, -1, -1)]

    def format_word(self, w):
        return _join([p for p in (_power("x", w[0]) if w[0] else "", _power("y", w[1]) if w[1] else "") if p])

    def _gens(self):
        return {"x": (1, 0), "y": (0, 1)}


class GroupFamily(Family):
    is_group = True


@dataclass(frozen=True)
class FreeGroup(GroupFamily):
    """Group algebra of the free group; letters are ``+-(k+1)``."""

    rank: int = 2

    def __post_init__(self):
        if not 1 <= self.rank <= 26:
            raise ValueError("free group rank must be in 1..26")

    @property
    def generator_names(self):
        return tuple("abcdefghijklmnopqrstuvwxyz"[: self.rank])

    def selector(self):
        return f"f:{self.rank}"

    def one(self):
        return ()

    def word_mul(self, u, v):
        return [(reduce_free(u, v), 1)]

    def word_degree(self, w):
        return len(w)

    def _letter_rank(self, s):
        return 2 * (abs(s) - 1) + (s < 0)

    def sort_key(self, w):
        return (len(w), tuple(self._letter_rank(s) for s in w))

    def truncation_size(self, d):
        r = 2 * self.rank
        return 1 + sum(r * (r - 1) ** (k - 1) for k in range(1, d + 1))

    def letters(self):
        return sorted([k for k in range(1, self.rank + 1)] + [-k for k in range(1, self.rank + 1)],
                      key=self._letter_rank)

    def words_up_to(self, d):
        letters = self.letters()
        out = [()]
        layer = [()]
        for _ in range(d):
            nxt = []
            for w in layer:
                for s in letters:
                    if w and w[-1] == -s:
                        continue
                    nxt.append(w + (s,))
            out.extend(nxt)
            layer = nxt
        return out

    def format_word(self, w):
        parts = []
        for s, run in itertools.groupby(w):
            e = len(list(run)) * (1 if s > 0 else -1)
            parts.append(_power(self.generator_names[abs(s) - 1], e))
        return _join(parts)

    def inverse_word(self, w):
        return tuple(-s for s in reversed(w))

    def _gens(self):
        return {name: (i + 1,) for i, name in enumerate(self.generator_names)}


def reduce_free(u: tuple, v: tuple) -> tuple:
    k = 0
    while k < len(u) and k < len(v) and u[len(u) - 1 - k] == -v[k]:
        k += 1
    return u[: len(u) - k] + v[k:]


@dataclass(frozen=True)
class Lattice(GroupFamily):
    """Group algebra of ``Z^d``. Degree is the sup-norm, so truncations are boxes."""

    rank: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("lattice rank must be >= 1")

    @property
    def generator_names(self):
        return default_names(self.rank)

    def selector(self):
        return f"z:{self.rank}"

    def one(self):
        return (0,) * self.rank

    def word_mul(self, u, v):
        return [(tuple(a + b for a, b in zip(u, v)), 1)]

    def word_degree(self, w):
        return max((abs(a) for a in w), default=0)

    def sort_key(self, w):
        return (self.word_degree(w), w)

    def truncation_size(self, d):
        return (2 * d + 1) ** self.rank

    def words_up_to(self, d):
        out = list(itertools.product(range(-d, d + 1), repeat=self.rank))
        out.sort(key=self.sort_key)
        return out

    def format_word(self, w):
        return _join([_power(self.generator_names[i], e) for i, e in enumerate(w) if e])

    def inverse_word(self, w):
        return tuple(-a for a in w)

    def _gens(self):
        return {name: tuple(int(i == k) for i in range(self.rank)) for k, name in enumerate(self.generator_names)}


HEIS_BFS_LIMIT = 2_000_000


def heis_mul(u, v):
    a, b, c = u
    a2, b2, c2 = v
    return (a + a2, b + b2, c + c2 - a2 * b)


class _HeisenbergBall:
    """Lazily grown Cayley ball for generators ``x^+-1, y^+-1``."""

    steps = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))

    def __init__(self):
        self.dist = {(0, 0, 0): 0}
        self.layers = [[(0, 0, 0)]]

    def grow_to(self, n: int) -> None:
        while len(self.layers) <= n:
            nxt = []
            r = len(self.layers)
            for w in self.layers[-1]:
                for s in self.steps:
                    # right multiplication by a generator: same metric as left by symmetry
                    u = heis_mul(w, s)
                    if u not in self.dist:
                        self.dist[u] = r
                        nxt.append(u)
            if len(self.dist) > HEIS_BFS_LIMIT:
                raise CapExceeded(f"Heisenberg BFS exceeded {HEIS_BFS_LIMIT} elements")
            self.layers.append(nxt)

    def length(self, w) -> int:
        while w not in self.dist:
            self.grow_to(len(self.layers))
        return self.dist[w]

    def ball_sizes(self, n: int) -> list:
        self.grow_to(n)
        out, total = [], 0
        for layer in self.layers[: n + 1]:
            total += len(layer)
            out.append(total)
        return out


HEIS_BALL = _HeisenbergBall()


@dataclass(frozen=True)
class Heisenberg3(GroupFamily):
    """Integer Heisenberg group; words ``(a, b, c)`` mean ``x^a y^b z^c``, ``z = x y x^-1 y^-1``."""

    generator_names: tuple = ("x", "y", "z")

    def selector(self):
        return "heis"

    def one(self):
        return (0, 0, 0)

    def word_mul(self, u, v):
        return [(heis_mul(u, v), 1)]

    def word_degree(self, w):
        return HEIS_BALL.length(w)

    def sort_key(self, w):
        return (HEIS_BALL.length(w), w)

    def truncation_size(self, d):
        if d > 60:
            raise CapExceeded("Heisenberg truncation degree too large")
        return HEIS_BALL.ball_sizes(d)[d]

    def words_up_to(self, d):
        HEIS_BALL.grow_to(d)
        out = [w for layer in HEIS_BALL.layers[: d + 1] for w in layer]
        out.sort(key=self.sort_key)
        return out

    def format_word(self, w):
        return _join([_power(n, e) for n, e in zip("xyz", w) if e])

    def inverse_word(self, w):
        a, b, c = w
        return (-a, -b, -c - a * b)

    def _gens(self):
        return {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}


# index 0..3 = 1, i, j, k; QUAT_TABLE[u][v] = (sign, index)
QUAT_TABLE = (
    ((1, 0), (1, 1), (1, 2), (1, 3)),
    ((1, 1), (-1, 0), (1, 3), (-1, 2)),
    ((1, 2), (-1, 3), (-1, 0), (1, 1)),
    ((1, 3), (1, 2), (-1, 1), (-1, 0)),
)


@dataclass(frozen=True)
class Quaternions(Family):
    generator_names: tuple = ("i", "j", "k")

    def selector(self):
        return "quat"

    def one(self):
        return 0

    def word_mul(self, u, v):
        s, w = QUAT_TABLE[u][v]
        return [(w, s)]

    def word_degree(self, w):
        return int(w != 0)

    def sort_key(self, w):
        return w

    def truncation_size(self, d):
        return 1 if d == 0 else 4

    def words_up_to(self, d):
        return [0] if d == 0 else [0, 1, 2, 3]

    def format_word(self, w):
        return "1ijk"[w]

    def _gens(self):
        return {"i": 1, "j": 2, "k": 3}


def _check_names(names):
    if not names:
        raise ValueError("need at least one generator")
    if len(set(names)) != len(names):
        raise ValueError(f"generator names not distinct: {names}")
    for n in names:
        if not (n[:1].isalpha() and n.replace("_", "").isalnum()):
            raise ValueError(f"bad generator name {n!r}")


def parse_family(selector: str) -> Family:
    """Family from a selector such as ``poly:2``, ``free:x,y``, ``weyl``, ``f2``, ``z:2``."""
    s = selector.strip()
    if s.lower() in ("weyl", "heis", "quat", "f2"):
        s = s.lower()
    if s == "weyl":
        return Weyl1()
    if s == "heis":
        return Heisenberg3()
    if s == "quat":
        return Quaternions()
    if s == "f2":
        return FreeGroup(2)
    kind, _, arg = s.partition(":")
    if not arg:
        raise ValueError(f"unknown algebra {selector!r}")
    if kind in ("free", "poly"):
        names = default_names(int(arg)) if arg.isdigit() else tuple(a.strip() for a in arg.split(","))
        if arg.isdigit() and int(arg) < 1:
            raise ValueError("need at least one generator")
        return FreeAssoc(names) if kind == "free" else CommutativePoly(names)
    if kind == "f" and arg.isdigit():
        return FreeGroup(int(arg))
    if kind == "z" and arg.isdigit():
        return Lattice(int(arg))
    raise ValueError(f"unknown algebra {selector!r}")


__all__ = [
    "AMBIENT_CAP", "Family", "FreeAssoc", "CommutativePoly", "Weyl1", "GroupFamily", "FreeGroup",
    "Lattice", "Heisenberg3", "Quaternions", "parse_family", "reduce_free", "heis_mul", "HEIS_BALL",
]
