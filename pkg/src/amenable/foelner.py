"""Foelner ratios ``dim(sum_i g_i V) / dim V`` and searches for small ones."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .artifacts import SCHEMA_VERSION, rows_from_json, rows_to_json
from .exactlin import CapExceeded, Echelon, Subspace, format_rational, parse_rational
from .kernel import AlgebraElement, Truncation, parse, parse_family, serialize, truncation

BRUTEFORCE_CAP = 22
GENERIC_BRUTEFORCE_CAP = 16
STRATEGIES = ("ball", "greedy", "random")


def common_family(gens: Sequence[AlgebraElement]):
    if not gens:
        raise ValueError("need at least one generator")
    fam = gens[0].family
    for g in gens[1:]:
        if g.family != fam:
            raise ValueError(f"generators from different families: {fam} and {g.family}")
    return fam


def max_degree(gens) -> int:
    return max((g.degree() for g in gens if g), default=0)


def left_mul_vector(g: AlgebraElement, vec: dict, src: Truncation, target: Truncation) -> dict:
    fam = src.family
    out: dict = {}
    for i, c in vec.items():
        w = src.basis[i]
        for u, cu in g.items():
            for x, k in fam.word_mul(u, w):
                j = target.index[x]
                out[j] = out.get(j, 0) + c * cu * k
    return {j: v for j, v in out.items() if v}


def image_target(gens, t: Truncation) -> Truncation:
    return truncation(t.family, t.degree_bound + max_degree(gens))


def image_sum(gens: Sequence[AlgebraElement], v: Subspace, t: Truncation) -> tuple:
    """``(sum_i g_i V, target truncation)``; V is included only if 1 is a generator."""
    target = image_target(gens, t)
    ech = Echelon(target.size)
    for g in gens:
        for b in v.vectors:
            ech.add(left_mul_vector(g, b, t, target))
    return ech.to_subspace(), target


@dataclass(frozen=True)
class RatioReport:
    generators: tuple
    subspace_dim: int
    image_dim: int
    ratio: Fraction
    degree: int

    def row(self):
        return (self.degree, self.subspace_dim, self.image_dim, self.ratio.numerator, self.ratio.denominator)


def _image_dim(gens, v: Subspace, t: Truncation, target: Truncation) -> int:
    ech = Echelon(target.size)
    for g in gens:
        for b in v.vectors:
            ech.add(left_mul_vector(g, b, t, target))
    return ech.rank


def ratio(gens: Sequence[AlgebraElement], v: Subspace, t: Truncation) -> RatioReport:
    fam = common_family(gens)
    if fam != t.family:
        raise ValueError(f"generators in {fam}, truncation of {t.family}")
    if v.ambient_dim != t.size:
        raise ValueError(f"subspace ambient {v.ambient_dim} does not match truncation size {t.size}")
    if v.dim == 0:
        raise ValueError("Foelner ratio of the zero subspace is undefined")
    target = image_target(gens, t)
    k = _image_dim(gens, v, t, target)
    return RatioReport(tuple(gens), v.dim, k, Fraction(k, v.dim), t.degree_bound)


@dataclass
class ScanResult:
    reports: list
    truncated: bool = False
    reason: str = ""


def ball_sequence_scan(gens: Sequence[AlgebraElement], d_max: int) -> ScanResult:
    fam = common_family(gens)
    out = []
    for n in range(d_max + 1):
        try:
            t = truncation(fam, n)
            image_target(gens, t)
        except CapExceeded as exc:
            return ScanResult(out, True, str(exc))
        out.append(ratio(gens, t.full(), t))
    return ScanResult(out)


@dataclass
class FoelnerCertificate:
    algebra: str
    generators: list  # canonical expression strings
    epsilon: Fraction
    degree: int
    subspace: Subspace
    ratio: Fraction
    image_dim: int
    search: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "foelner_certificate",
            "algebra": self.algebra,
            "generators": list(self.generators),
            "epsilon": format_rational(self.epsilon),
            "degree": self.degree,
            "ambient_size": self.subspace.ambient_dim,
            "subspace_dim": self.subspace.dim,
            "image_dim": self.image_dim,
            "ratio": format_rational(self.ratio),
            "basis": rows_to_json(self.subspace),
            "search": dict(self.search),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FoelnerCertificate":
        if data.get("kind") != "foelner_certificate":
            raise ValueError("not a Foelner certificate")
        return cls(
            algebra=data["algebra"],
            generators=list(data["generators"]),
            epsilon=parse_rational(data["epsilon"]),
            degree=int(data["degree"]),
            subspace=rows_from_json(data["basis"], int(data["ambient_size"])),
            ratio=parse_rational(data["ratio"]),
            image_dim=int(data["image_dim"]),
            search=dict(data.get("search", {})),
        )


def verify_certificate(data: dict) -> list:
    """Re-check a certificate from its JSON form; returns a list of problems (empty = valid)."""
    problems = []
    try:
        cert = FoelnerCertificate.from_json(data)
        fam = parse_family(cert.algebra)
        gens = [parse(fam, g) for g in cert.generators]
        t = truncation(fam, cert.degree)
    except (KeyError, ValueError, TypeError) as exc:
        return [f"malformed certificate: {exc}"]
    if data.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"unsupported schema_version {data.get('schema_version')!r}")
    if t.size != cert.subspace.ambient_dim:
        problems.append(f"ambient_size {cert.subspace.ambient_dim} != truncation size {t.size}")
        return problems
    canon = Subspace.span(cert.subspace.vectors, t.size)
    if canon != cert.subspace:
        problems.append("basis is not in canonical reduced row-echelon form")
    if data.get("subspace_dim") != canon.dim:
        problems.append("subspace_dim does not match basis")
    if canon.dim == 0:
        problems.append("empty subspace")
        return problems
    rep = ratio(gens, canon, t)
    if rep.ratio != cert.ratio:
        problems.append(f"stored ratio {format_rational(cert.ratio)} != recomputed {format_rational(rep.ratio)}")
    if rep.image_dim != cert.image_dim:
        problems.append(f"stored image_dim {cert.image_dim} != recomputed {rep.image_dim}")
    if cert.epsilon <= 0:
        problems.append("epsilon must be positive")
    if not rep.ratio < 1 + cert.epsilon:
        problems.append(f"ratio {format_rational(rep.ratio)} is not below 1 + epsilon")
    return problems


@dataclass
class Exhausted:
    best_ratio: Fraction | None
    best_degree: int | None
    best_subspace: Subspace | None
    strategy: str
    evaluations: int
    trace: list  # (evaluation, ratio) at each improvement

    def to_json(self, gens, epsilon, seed, budget) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "exhausted",
            "algebra": gens[0].family.selector(),
            "generators": [serialize(g) for g in gens],
            "epsilon": format_rational(epsilon),
            "best_ratio": None if self.best_ratio is None else format_rational(self.best_ratio),
            "best_degree": self.best_degree,
            "best_basis": None if self.best_subspace is None else rows_to_json(self.best_subspace),
            "trace": [[i, format_rational(r)] for i, r in self.trace],
            "search": {"strategy": self.strategy, "seed": seed, "budget": budget, "evaluations": self.evaluations},
        }


class _Tracker:
    def __init__(self, gens, epsilon, budget):
        self.gens = gens
        self.bound = 1 + Fraction(epsilon)
        self.budget = budget
        self.evaluations = 0
        self.best = None  # (ratio, degree, subspace)
        self.trace = []

    def evaluate(self, v: Subspace, t: Truncation) -> Fraction:
        self.evaluations += 1
        r = ratio(self.gens, v, t).ratio
        if self.best is None or r < self.best[0]:
            self.best = (r, t.degree_bound, v)
            self.trace.append((self.evaluations, r))
        return r

    @property
    def found(self) -> bool:
        return self.best is not None and self.best[0] < self.bound

    @property
    def spent(self) -> bool:
        return self.evaluations >= self.budget


def _ball(tr: _Tracker, fam, degree):
    n = 0
    while not tr.spent and not tr.found and (degree is None or n <= degree):
        try:
            t = truncation(fam, n)
            image_target(tr.gens, t)
        except CapExceeded:
            return
        tr.evaluate(t.full(), t)
        n += 1


def _greedy(tr: _Tracker, t: Truncation, rng: random.Random):
    n = t.size
    while not tr.spent and not tr.found:
        cur = set(rng.sample(range(n), rng.randint(1, n)))
        cur_r = tr.evaluate(Subspace.coordinate(cur, n), t)
        while not tr.spent and not tr.found:
            best = None
            for i in range(n):
                if tr.spent or tr.found:
                    return
                cand = cur ^ {i}
                if not cand:
                    continue
                r = tr.evaluate(Subspace.coordinate(cand, n), t)
                if best is None or r < best[0]:
                    best = (r, i)
            if best is None or best[0] >= cur_r:
                break
            cur_r = best[0]
            cur ^= {best[1]}


def _random(tr: _Tracker, t: Truncation, rng: random.Random):
    n = t.size
    density = min(1.0, 3 / n)
    while not tr.spent and not tr.found:
        k = rng.randint(1, n)
        vecs = [sparse_random_vector(n, density, rng) for _ in range(k)]
        tr.evaluate(Subspace.span(vecs, n), t)


def sparse_random_vector(n: int, density: float, rng: random.Random) -> dict:
    vec = {i: Fraction(rng.choice((-1, 1))) for i in range(n) if rng.random() < density}
    if not vec:
        vec[rng.randrange(n)] = Fraction(rng.choice((-1, 1)))
    return vec


def witness_search(gens: Sequence[AlgebraElement], epsilon, *, budget: int = 64, seed: int = 0,
                   strategy: str = "ball", degree: int | None = None):
    """Look for V with ratio < 1 + epsilon.

    ``budget`` counts ratio evaluations. ``degree`` is the ambient truncation
    for the greedy and random strategies (default 2) and an upper level for
    the ball scan. Returns a :class:`FoelnerCertificate` or :class:`Exhausted`.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if budget <= 0:
        raise ValueError("budget must be positive")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    gens = list(gens)
    fam = common_family(gens)
    tr = _Tracker(gens, epsilon, budget)
    rng = random.Random(seed)
    if strategy == "ball":
        _ball(tr, fam, degree)
    else:
        t = truncation(fam, 2 if degree is None else degree)
        image_target(gens, t)
        (_greedy if strategy == "greedy" else _random)(tr, t, rng)
    meta = {"strategy": strategy, "seed": seed, "budget": budget, "evaluations": tr.evaluations}
    if tr.found:
        r, d, v = tr.best
        t = truncation(fam, d)
        rep = ratio(gens, v, t)
        return FoelnerCertificate(fam.selector(), [serialize(g) for g in gens], epsilon, d, v, r,
                                  rep.image_dim, meta)
    best = tr.best or (None, None, None)
    return Exhausted(best[0], best[1], best[2], strategy, tr.evaluations, tr.trace)


# -- exhaustive minimum over monomial subspaces ------------------------------

def _images_by_word(gens, t: Truncation, target: Truncation) -> list:
    return [[left_mul_vector(g, {i: Fraction(1)}, t, target) for g in gens] for i in range(t.size)]


def _is_monomial_action(images) -> bool:
    return all(len(v) <= 1 for per_word in images for v in per_word)


def _mask_minimum(hit_sets: list) -> tuple:
    """Exact ``min |union_{j in S} hit_j| / |S|`` over nonempty S; returns (ratio, S)."""
    n = len(hit_sets)
    cols = sorted(set().union(*hit_sets)) if hit_sets else []
    pos = {c: i for i, c in enumerate(cols)}
    k = max(1, math.ceil(len(cols) / 64))
    masks = np.zeros((n, k), dtype=np.uint64)
    for j, hs in enumerate(hit_sets):
        for c in hs:
            b = pos[c]
            masks[j, b // 64] |= np.uint64(1) << np.uint64(b % 64)
    tbl = np.zeros((1, k), dtype=np.uint64)
    for j in range(n):
        tbl = np.concatenate([tbl, tbl | masks[j]])
    img = np.bitwise_count(tbl).sum(axis=1, dtype=np.int64)
    size = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    lcm = math.lcm(*range(1, n + 1))
    key = np.full(1 << n, np.iinfo(np.int64).max, dtype=np.int64)
    key[1:] = img[1:] * (lcm // size[1:])
    s = int(np.argmin(key))
    subset = tuple(j for j in range(n) if s >> j & 1)
    return Fraction(int(img[s]), len(subset)), subset


def _generic_minimum(vectors_by_source: list, ambient: int) -> tuple:
    n = len(vectors_by_source)
    best = None
    for s in range(1, 1 << n):
        ech = Echelon(ambient)
        members = [j for j in range(n) if s >> j & 1]
        for j in members:
            for v in vectors_by_source[j]:
                ech.add(v)
        r = Fraction(ech.rank, len(members))
        if best is None or r < best[0]:
            best = (r, tuple(members))
    return best


def min_ratio_bruteforce(gens: Sequence[AlgebraElement], d: int) -> tuple:
    """Exact minimum ratio over spans of nonempty subsets of the degree-``d`` basis.

    Returns ``(ratio, words)``. Images are taken in the enlarged truncation, so
    boundary words are never lost.
    """
    fam = common_family(gens)
    t = truncation(fam, d)
    if t.size > BRUTEFORCE_CAP:
        raise ValueError(f"basis size {t.size} exceeds {BRUTEFORCE_CAP}; use witness_search instead")
    target = image_target(gens, t)
    images = _images_by_word(gens, t, target)
    if _is_monomial_action(images):
        r, subset = _mask_minimum([set().union(*(v.keys() for v in per)) for per in images])
    else:
        if t.size > GENERIC_BRUTEFORCE_CAP:
            raise ValueError(f"non-monomial action: basis size {t.size} exceeds {GENERIC_BRUTEFORCE_CAP}; "
                             "use witness_search instead")
        r, subset = _generic_minimum(images, target.size)
    return r, tuple(t.basis[j] for j in subset)
