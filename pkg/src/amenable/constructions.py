"""Transfer constructions run on explicit finite data.

* quotient transport: from a Foelner sequence W_n of A and elements x_i r, r
  of A, build Z_n, T_n, S_n and the transported space r S_n;
* tensor Foelner sets V = W ⊗ Z and the containment bound on their ratio;
* minimum ratios over monomial subspaces of m-fold direct sums.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .artifacts import SCHEMA_VERSION
from .exactlin import (AMBIENT_CAP, CapExceeded, Echelon, Matrix, Subspace, format_rational, image, intersect,
                       preimage_into, sum_spaces)
from .foelner import (BRUTEFORCE_CAP, GENERIC_BRUTEFORCE_CAP, _generic_minimum, _images_by_word,
                      _is_monomial_action, _mask_minimum, common_family, image_sum, image_target,
                      sparse_random_vector)
from .kernel import AlgebraElement, Truncation, as_operator, serialize, truncation
from .ore import InvariantViolation


def _q(x: Fraction) -> str:
    return format_rational(x)


def _op_into(a: AlgebraElement, t: Truncation, target_size: int) -> Matrix:
    """Left multiplication by ``a`` from ``t`` into a truncation of size >= its natural target."""
    m, tt = as_operator(a, t)
    if tt.size > target_size:
        raise ValueError("target too small")
    return Matrix(target_size, m.cols, m.columns)


@dataclass
class TransportLevel:
    n: int
    dim_W: int
    dim_Z: int
    dim_T: int
    dim_S: int
    dim_rS: int
    dim_Zi: list
    image_dim: int  # dim sum_i x_i (r S_n)

    @property
    def coverage(self) -> Fraction:
        """dim(r S_n) / dim(W_n); tends to 1 along a Foelner sequence."""
        return Fraction(self.dim_rS, self.dim_W)

    @property
    def transported_ratio(self) -> Fraction | None:
        if self.dim_rS == 0:
            return None
        return Fraction(self.image_dim, self.dim_rS)

    def to_json(self) -> dict:
        tr = self.transported_ratio
        return {"n": self.n, "dim_W": self.dim_W, "dim_Z": self.dim_Z, "dim_T": self.dim_T, "dim_S": self.dim_S,
                "dim_rS": self.dim_rS, "dim_Z_i": list(self.dim_Zi), "image_dim": self.image_dim,
                "coverage": _q(self.coverage), "transported_ratio": None if tr is None else _q(tr)}


@dataclass
class TransportReport:
    algebra: str
    x_times_r: list
    r: str
    levels: list = field(default_factory=list)
    truncated: bool = False

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": "transport_report", "algebra": self.algebra,
                "x_times_r": self.x_times_r, "r": self.r, "truncated": self.truncated,
                "levels": [lv.to_json() for lv in self.levels]}


def transport_level(xr: Sequence[AlgebraElement], r: AlgebraElement, t: Truncation,
                    W: Subspace | None = None) -> TransportLevel:
    """One level of the transport chain with every containment checked exactly."""
    W = t.full() if W is None else W
    deg = max([r.degree()] + [x.degree() for x in xr if x])
    big = truncation(t.family, t.degree_bound + deg).size
    Wb = W.embed(big)
    R = _op_into(r, t, big)
    Ts = preimage_into(R, W, Wb)
    Zis = [preimage_into(_op_into(x, t, big), W, Wb) for x in xr]
    Z = W
    for zi in Zis:
        Z = intersect(Z, zi)
    S = intersect(Z, Ts)
    rS = image(R, S)
    if not Wb.contains_subspace(rS):
        raise InvariantViolation("r S_n is not contained in W_n")
    images = []
    for x in xr:
        xs = image(_op_into(x, t, big), S)  # x_i (r s) = (x_i r) s
        if not Wb.contains_subspace(xs):
            raise InvariantViolation("x_i r S_n is not contained in W_n")
        images.append(xs)
    total = sum_spaces(*images) if images else Subspace.zero(big)
    # counting bound: dim Z >= sum dim Z^i - (m-1) dim W
    if Z.dim < sum(z.dim for z in Zis) - (len(Zis) - 1) * W.dim:
        raise InvariantViolation("intersection dimension below the counting bound")
    if not (S.dim <= Ts.dim <= W.dim and S.dim <= Z.dim):
        raise InvariantViolation("chain S ⊆ T, Z ⊆ W violated")
    return TransportLevel(t.degree_bound, W.dim, Z.dim, Ts.dim, S.dim, rS.dim, [z.dim for z in Zis], total.dim)


def quotient_transport(x_times_r: Sequence[AlgebraElement], r: AlgebraElement, d_max: int,
                       start: int = 0) -> TransportReport:
    """Run the chain on the ball sequence ``W_n = Truncation(n)``, ``n = start..d_max``.

    The caller supplies the products ``x_i r`` (all in A) and ``r``.
    """
    if not r:
        raise ValueError("r must be nonzero")
    fam = common_family([r, *x_times_r])
    rep = TransportReport(fam.selector(), [serialize(x) for x in x_times_r], serialize(r))
    deg = max([r.degree()] + [x.degree() for x in x_times_r if x])
    for n in range(start, d_max + 1):
        try:
            t = truncation(fam, n)
            truncation(fam, n + deg)
        except CapExceeded:
            rep.truncated = True
            break
        rep.levels.append(transport_level(x_times_r, r, t))
    return rep


# -- tensor products ---------------------------------------------------------

@dataclass
class TensorReport:
    ratio_A: Fraction
    ratio_B: Fraction
    product_ratio: Fraction
    dim_V: int
    image_dim: int

    @property
    def bound(self) -> Fraction:
        return self.ratio_A * self.ratio_B

    @property
    def slack(self) -> Fraction:
        return self.bound - self.product_ratio

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": "tensor_report", "ratio_A": _q(self.ratio_A),
                "ratio_B": _q(self.ratio_B), "product_ratio": _q(self.product_ratio), "bound": _q(self.bound),
                "slack": _q(self.slack), "dim_V": self.dim_V, "image_dim": self.image_dim}


def tensor_vector(x: dict, y: dict, ny: int) -> dict:
    return {i * ny + j: a * b for i, a in x.items() for j, b in y.items()}


def tensor_space(U: Subspace, Z: Subspace) -> Subspace:
    return Subspace.span((tensor_vector(x, y, Z.ambient_dim) for x in U.vectors for y in Z.vectors),
                         U.ambient_dim * Z.ambient_dim)


def tensor_foelner(gens_A: Sequence[AlgebraElement], W: Subspace, tA: Truncation,
                   gens_B: Sequence[AlgebraElement], Z: Subspace, tB: Truncation) -> TensorReport:
    """Ratio of ``{a_i ⊗ b_j}`` on ``W ⊗ Z`` versus the product of the factor ratios."""
    if W.dim == 0 or Z.dim == 0:
        raise ValueError("W and Z must be nonzero")
    sumA, targA = image_sum(gens_A, W, tA)
    sumB, targB = image_sum(gens_B, Z, tB)
    n_big = targA.size * targB.size
    if n_big > AMBIENT_CAP:
        raise CapExceeded(f"tensor ambient {n_big} exceeds cap {AMBIENT_CAP}")
    images_A = [image_sum([a], W, tA)[0].embed(targA.size) for a in gens_A]
    images_B = [image_sum([b], Z, tB)[0].embed(targB.size) for b in gens_B]
    ech = Echelon(n_big)
    for ia in images_A:
        for ib in images_B:
            for x in ia.vectors:
                for y in ib.vectors:
                    ech.add(tensor_vector(x, y, targB.size))
    prod = ech.to_subspace()
    container = tensor_space(sumA, sumB)
    if not container.contains_subspace(prod):
        raise InvariantViolation("sum (a_i ⊗ b_j) V not inside (sum a_i W) ⊗ (sum b_j Z)")
    ra, rb = Fraction(sumA.dim, W.dim), Fraction(sumB.dim, Z.dim)
    pr = Fraction(prod.dim, W.dim * Z.dim)
    if pr > ra * rb:
        raise InvariantViolation("tensor ratio exceeds the product bound")
    return TensorReport(ra, rb, pr, W.dim * Z.dim, prod.dim)


# -- direct sums -------------------------------------------------------------

@dataclass
class DsumResult:
    ratio: Fraction
    witness: tuple  # (word, copy) pairs
    exact: bool
    evaluations: int = 0

    def to_json(self, fam) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": "dsum_result", "ratio": _q(self.ratio),
                "exact": self.exact, "evaluations": self.evaluations,
                "witness": [[fam.format_word(w), j] for w, j in self.witness]}


def dsum_monomial_min(gens: Sequence[AlgebraElement], m: int, d: int, *, seed: int = 0,
                      samples: int = 200) -> DsumResult:
    """Minimum ratio over subspaces of ``A^m`` spanned by (basis word, copy) pairs.

    Generators act diagonally. Exhaustive when ``m * basis <= 22``;
    otherwise best-found over sparse random subspaces of the direct sum.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    fam = common_family(gens)
    t = truncation(fam, d)
    target = image_target(gens, t)
    images = _images_by_word(gens, t, target)
    pairs = [(t.basis[i], j) for j in range(m) for i in range(t.size)]
    n = m * t.size
    shifted = [[{j * target.size + c: x for c, x in v.items()} for v in images[i]]
               for j in range(m) for i in range(t.size)]
    if n <= BRUTEFORCE_CAP and _is_monomial_action(images):
        r, subset = _mask_minimum([set().union(*(v.keys() for v in per)) for per in shifted])
        return DsumResult(r, tuple(pairs[k] for k in subset), True, (1 << n) - 1)
    if n <= GENERIC_BRUTEFORCE_CAP:
        r, subset = _generic_minimum(shifted, m * target.size)
        return DsumResult(r, tuple(pairs[k] for k in subset), True, (1 << n) - 1)
    rng = random.Random(seed)
    best = None
    big = m * target.size
    for s in range(samples):
        k = rng.randint(1, n)
        vecs = [sparse_random_vector(n, min(1.0, 3 / n), rng) for _ in range(k)]
        V = Subspace.span(vecs, n)
        ech = Echelon(big)
        for row in V.vectors:
            for gi in range(len(gens)):
                out: dict = {}
                for src, c in row.items():
                    for col, x in shifted[src][gi].items():
                        out[col] = out.get(col, 0) + c * x
                ech.add(out)
        r = Fraction(ech.rank, V.dim)
        if best is None or r < best[0]:
            best = (r, tuple(pairs[p] for p in V.pivots))
    return DsumResult(best[0], best[1], False, samples)
