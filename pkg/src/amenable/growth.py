"""Growth profiles ``n -> dim (k + V r)^n`` and their log-log slopes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .artifacts import SCHEMA_VERSION
from .exactlin import AMBIENT_CAP, Echelon
from .kernel import AlgebraElement, Heisenberg3, serialize
from .kernel.families import HEIS_BALL

EXPONENTIAL_STEP = 0.5  # mean increase of log2(dim) per step that flags exponential growth


@dataclass
class GrowthProfile:
    family: object
    V: list
    r: AlgebraElement
    points: list  # (n, dim)
    fitted_slope: float | None = None
    fit_window: tuple | None = None
    exponential: bool = False
    truncated: bool = False
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "growth_profile",
            "algebra": self.family.selector(),
            "V": [serialize(v) for v in self.V],
            "r": serialize(self.r),
            "points": [[n, d] for n, d in self.points],
            "fitted_slope": None if self.fitted_slope is None else round(self.fitted_slope, 12),
            "fit_window": None if self.fit_window is None else list(self.fit_window),
            "exponential": self.exponential,
            "truncated": self.truncated,
        }


class _WordIndex:
    """Growing word -> column map; column order is irrelevant for dimensions."""

    def __init__(self):
        self.index = {}

    def vector(self, e: AlgebraElement) -> dict:
        out = {}
        for w, c in e.items():
            j = self.index.get(w)
            if j is None:
                j = self.index[w] = len(self.index)
            out[j] = c
        return out


def power_dims(V: Sequence[AlgebraElement], r: AlgebraElement, N: int, *, cap: int = AMBIENT_CAP) -> tuple:
    """Dimensions of ``S_n = span of products of <= n factors from {1} + V r``.

    Returns ``(points, truncated)``. Only vectors that were new at step n-1
    are multiplied at step n, since ``S_n = S_{n-1} + D_{n-1} U``.
    """
    fam = r.family
    for v in V:
        if v.family != fam:
            raise ValueError("V and r must lie in one family")
    one = AlgebraElement.scalar(fam, 1)
    factors = [v * r for v in V]
    factors = [f for f in factors if f]
    words = _WordIndex()
    ech = Echelon(10 ** 12)  # columns are allocated lazily by _WordIndex
    ech.add(words.vector(one))
    points = [(0, 1)]
    fresh = [one]
    for n in range(1, N + 1):
        nxt = []
        for s in fresh:
            for f in factors:
                p = s * f
                if p and ech.add(words.vector(p)):
                    nxt.append(p)
                    if ech.rank > cap:
                        return points, True
        points.append((n, ech.rank))
        fresh = nxt
    return points, False


def fit_slope(points: Sequence[tuple], window: tuple | None = None) -> float:
    """Least-squares slope of log(dim) against log(n) over ``window = (n_min, n_max)``."""
    if window is None:
        window = default_window(points)
    lo, hi = window
    sel = [(n, d) for n, d in points if lo <= n <= hi]
    if len(sel) < 3 or any(n < 2 for n, _ in sel):
        raise ValueError(f"window {window} needs >= 3 points, all with n >= 2")
    x = np.log([n for n, _ in sel])
    y = np.log([d for _, d in sel])
    slope = np.polyfit(x, y, 1)[0]
    return 0.0 if abs(slope) < 1e-12 else float(slope)


def default_window(points) -> tuple:
    ns = [n for n, _ in points]
    top = ns[len(ns) // 2:]
    lo = max(2, top[0]) if top else 2
    return (lo, ns[-1])


def exponential_flag(points, window=None) -> bool:
    if window is None:
        window = default_window(points)
    sel = [d for n, d in points if window[0] <= n <= window[1]]
    if len(sel) < 2:
        return False
    steps = [math.log2(b) - math.log2(a) for a, b in zip(sel, sel[1:])]
    return sum(steps) / len(steps) > EXPONENTIAL_STEP


def profile(V: Sequence[AlgebraElement], r: AlgebraElement, N: int, window: tuple | None = None) -> GrowthProfile:
    points, truncated = power_dims(V, r, N)
    prof = GrowthProfile(r.family, list(V), r, points, truncated=truncated)
    try:
        prof.fit_window = window or default_window(points)
        prof.fitted_slope = fit_slope(points, prof.fit_window)
        prof.exponential = exponential_flag(points, prof.fit_window)
    except ValueError as exc:
        prof.fit_window = None
        prof.notes.append(str(exc))
    return prof


def heisenberg_growth(N: int) -> list:
    """Cayley-ball sizes of the Heisenberg group for generators ``x^+-1, y^+-1``."""
    return list(enumerate(HEIS_BALL.ball_sizes(N)))


__all__ = ["GrowthProfile", "power_dims", "fit_slope", "exponential_flag", "profile", "heisenberg_growth",
           "Heisenberg3"]
