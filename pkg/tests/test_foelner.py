import json
import random
from fractions import Fraction

import pytest

from amenable.artifacts import dumps
from amenable.exactlin import Subspace
from amenable.foelner import (Exhausted, FoelnerCertificate, ball_sequence_scan, min_ratio_bruteforce, ratio,
                              verify_certificate, witness_search)
from amenable.kernel import (AlgebraElement, CommutativePoly, FreeAssoc, FreeGroup, Heisenberg3, Lattice,
                             Quaternions, Weyl1, parse_list, truncation)
from oracles import dense_rank, free_reduce, reduced_words, set_union_minimum

P1 = CommutativePoly(("x",))


def gens(fam, s):
    return parse_list(fam, s)


def test_ratio_poly1_ball():
    for n in range(8):
        t = truncation(P1, n)
        assert ratio(gens(P1, "1,x"), t.full(), t).ratio == Fraction(n + 2, n + 1)


def test_ratio_quaternions_full():
    q = Quaternions()
    t = truncation(q, 1)
    rep = ratio(gens(q, "i,j"), t.full(), t)
    assert rep.ratio == 1 and rep.image_dim == 4


def test_ratio_free_group_ball_matches_set_count():
    f = FreeGroup(2)
    for n in range(5):
        t = truncation(f, n)
        # oracle: |B_n ∪ a^±B_n ∪ b^±B_n| via string reduction
        ball = reduced_words(2, n)
        img = {free_reduce(g + w) for g in ("", "a", "A", "b", "B") for w in ball}
        rep = ratio(gens(f, "1,a,a^-1,b,b^-1"), t.full(), t)
        assert rep.image_dim == len(img)
        assert rep.ratio == Fraction(2 * 3 ** (n + 1) - 1, 2 * 3 ** n - 1)


def test_ratio_literal_excludes_V():
    t = truncation(P1, 3)
    assert ratio(gens(P1, "x"), t.full(), t).ratio == 1
    assert ratio(gens(P1, "1,x"), t.full(), t).ratio == Fraction(5, 4)


def test_ratio_errors():
    t = truncation(P1, 2)
    with pytest.raises(ValueError):
        ratio(gens(P1, "x"), Subspace.zero(t.size), t)
    with pytest.raises(ValueError):
        ratio(gens(Weyl1(), "x"), t.full(), t)


def test_scan_examples():
    rs = ball_sequence_scan(gens(Weyl1(), "1,x,y"), 6).reports
    assert [r.ratio for r in rs] == [Fraction((n + 2) * (n + 3), (n + 1) * (n + 2)) for n in range(7)]
    rs = ball_sequence_scan(gens(FreeAssoc(), "1,x,y"), 6).reports
    assert [r.ratio for r in rs] == [Fraction(2 ** (n + 2) - 1, 2 ** (n + 1) - 1) for n in range(7)]
    z = Lattice(2)
    rs = ball_sequence_scan(gens(z, "1,x,x^-1,y,y^-1"), 5).reports
    assert [r.ratio for r in rs] == [Fraction((2 * n + 1) ** 2 + 4 * (2 * n + 1), (2 * n + 1) ** 2) for n in range(6)]


def test_scan_truncates_at_cap():
    res = ball_sequence_scan(gens(FreeAssoc(), "1,x,y"), 20)
    assert res.truncated and len(res.reports) == 12


def test_search_poly2_ball():
    cert = witness_search(gens(CommutativePoly(), "1,x,y"), Fraction(1, 10))
    assert isinstance(cert, FoelnerCertificate)
    assert cert.degree == 20 and cert.ratio == Fraction(23, 21) < Fraction(11, 10)
    assert verify_certificate(cert.to_json()) == []


def test_search_quaternions():
    q = Quaternions()
    for g in ("i,j", "1+i, j-k, 2*k"):
        cert = witness_search(gens(q, g), Fraction(1, 1000))
        assert cert.ratio == 1 and cert.subspace.dim == 4
    # a single invertible generator already fixes span{1}
    assert witness_search(gens(q, "i"), Fraction(1, 1000)).ratio == 1


def test_search_free_exhausted():
    for strategy in ("ball", "greedy", "random"):
        res = witness_search(gens(FreeAssoc(), "x,y"), Fraction(1, 2), budget=40, seed=3, strategy=strategy,
                             degree=3)
        assert isinstance(res, Exhausted)
        assert res.best_ratio >= 2
        assert res.evaluations <= 40


def test_greedy_finds_witness():
    # in poly:1, {x} alone has ratio 1 on any subspace
    cert = witness_search(gens(P1, "x"), Fraction(1, 10), strategy="greedy", degree=3, seed=1)
    assert isinstance(cert, FoelnerCertificate) and cert.ratio == 1
    cert = witness_search(gens(Quaternions(), "i,j"), Fraction(1, 10), strategy="random", degree=1, budget=500)
    assert isinstance(cert, FoelnerCertificate) and cert.ratio == 1


def test_search_is_deterministic():
    g = gens(Weyl1(), "1,x,y")
    runs = [witness_search(g, Fraction(1, 100), budget=30, seed=9, strategy=s, degree=2)
            for s in ("greedy", "random") for _ in range(2)]
    assert runs[0] == runs[1] and runs[2] == runs[3]


def test_search_argument_checks():
    g = gens(P1, "x")
    with pytest.raises(ValueError):
        witness_search(g, 0)
    with pytest.raises(ValueError):
        witness_search(g, Fraction(1, 2), budget=0)
    with pytest.raises(ValueError):
        witness_search(g, Fraction(1, 2), strategy="annealing")


def test_certificate_roundtrip_and_tamper():
    cert = witness_search(gens(Lattice(2), "1,x,x^-1,y,y^-1"), Fraction(1, 4))
    data = json.loads(dumps(cert.to_json()))
    back = FoelnerCertificate.from_json(data)
    fam = Lattice(2)
    rep = ratio(gens(fam, ",".join(back.generators)), back.subspace, truncation(fam, back.degree))
    assert rep.ratio == cert.ratio == back.ratio
    assert verify_certificate(data) == []
    bad = dict(data, ratio="1")
    assert verify_certificate(bad)
    bad = dict(data, epsilon="1/1000")
    assert any("below" in p for p in verify_certificate(bad))
    bad = dict(data, basis=data["basis"][:-1])
    assert verify_certificate(bad)
    assert verify_certificate({"kind": "nope"})


def test_bruteforce_free_group_d1():
    f = FreeGroup(2)
    r, words = min_ratio_bruteforce(gens(f, "a,a^-1,b,b^-1"), 1)
    ball = sorted(reduced_words(2, 1))
    oracle = set_union_minimum(ball, lambda w: {free_reduce(g + w) for g in "aAbB"})
    assert r == oracle == Fraction(13, 4)
    t = truncation(f, 1)
    assert ratio(gens(f, "a,a^-1,b,b^-1"), t.monomial_span(words), t).ratio == r


def test_bruteforce_images_live_in_enlarged_truncation():
    r, words = min_ratio_bruteforce(gens(P1, "x"), 3)
    assert r == 1
    r, words = min_ratio_bruteforce(gens(P1, "1,x"), 3)
    assert r == Fraction(5, 4) and len(words) == 4


def test_bruteforce_unit_generator():
    for fam in (FreeAssoc(), Weyl1(), Quaternions(), FreeGroup(2)):
        r, _ = min_ratio_bruteforce([AlgebraElement.scalar(fam, 1)], 1)
        assert r == 1


def test_bruteforce_non_monomial_action_matches_rank():
    w = Weyl1()
    g = gens(w, "1,y")
    r, words = min_ratio_bruteforce(g, 2)
    t = truncation(w, 2)
    tt = truncation(w, 3)
    best = None
    import itertools
    for k in range(1, t.size + 1):
        for S in itertools.combinations(t.basis, k):
            rows = []
            for word in S:
                for x in g:
                    v = tt.vector(x * AlgebraElement.word(w, word))
                    rows.append([v.get(j, 0) for j in range(tt.size)])
            q = Fraction(dense_rank(rows), k)
            best = q if best is None or q < best else best
    assert r == best


def test_bruteforce_cap():
    with pytest.raises(ValueError, match="witness_search"):
        min_ratio_bruteforce(gens(FreeAssoc(), "x,y"), 4)


@pytest.mark.parametrize("fam,g", [(CommutativePoly(), "x"), (Weyl1(), "y"), (FreeAssoc(), "x+y"),
                                   (FreeGroup(2), "a+b^-1"), (Heisenberg3(), "1+x"), (Quaternions(), "1+i")],
                         ids=str)
def test_domain_lower_bound(fam, g):
    rng = random.Random(4)
    t = truncation(fam, 2)
    for _ in range(20):
        V = Subspace.span([{i: Fraction(rng.randint(-1, 1)) for i in range(t.size) if rng.random() < 0.3}
                           for _ in range(rng.randint(1, 4))], t.size)
        if not V.dim:
            continue
        assert ratio(gens(fam, g), V, t).ratio == 1
        assert ratio(gens(fam, "1," + g), V, t).ratio >= 1


def test_ratio_monotone_in_ambient_and_union_bound():
    rng = random.Random(8)
    for fam, g in ((Weyl1(), "1,x,y"), (FreeGroup(2), "a,b,a*b"), (CommutativePoly(), "x+y,x*y")):
        t2, t3 = truncation(fam, 2), truncation(fam, 3)
        for _ in range(15):
            V = Subspace.span([{i: Fraction(rng.randint(-1, 1)) for i in range(t2.size) if rng.random() < 0.4}
                               for _ in range(rng.randint(1, 4))], t2.size)
            if not V.dim:
                continue
            gg = gens(fam, g)
            a, b = ratio(gg, V, t2), ratio(gg, V.embed(t3.size), t3)
            assert a.ratio == b.ratio
            singles = sum(ratio([x], V, t2).image_dim for x in gg)
            assert a.image_dim <= min(truncation(fam, 2 + max(x.degree() for x in gg)).size, singles)
