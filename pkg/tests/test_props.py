import random

import pytest

from dichotomy.engine import Decision, run_dichotomy, candidate_from_trace
from dichotomy.props import (
    AffineMap,
    ClassVerdict,
    TruthKind,
    exact_prover,
    multi_hole,
    parse_proposition,
    periodic,
    pull_back,
    single_hole,
)
from dichotomy.residue import NATURALS, ResidueClass, split

ALL, SOME, UND = ClassVerdict.ALL_HOLD, ClassVerdict.SOME_FAILS, ClassVerdict.UNDECIDABLE


def test_single_hole_examples():
    P = single_hole(13)
    assert P.eval(13).kind is TruthKind.FAILS
    assert P.eval(12).kind is TruthKind.HOLDS
    assert P.holds_on_class(ResidueClass(3, 5)) is SOME
    assert P.holds_on_class(ResidueClass(4, 5)) is ALL


def test_multi_hole_examples():
    P = multi_hole({5, 13})
    assert P.holds_on_class(ResidueClass(2, 1)) is SOME
    assert P.eval(9).kind is TruthKind.HOLDS
    empty = multi_hole([])
    for c in [NATURALS, ResidueClass(3, 2), ResidueClass(7, 100)]:
        assert empty.holds_on_class(c) is ALL


def test_periodic_examples():
    P = periodic(1, [True, False])
    assert P.eval(4).kind is TruthKind.HOLDS
    assert P.holds_on_class(ResidueClass(1, 1)) is SOME
    assert P.holds_on_class(NATURALS) is UND
    Q = periodic(2, [True, True, False, True])
    assert Q.holds_on_class(ResidueClass(2, 2)) is SOME
    assert Q.holds_on_class(ResidueClass(1, 1)) is UND
    with pytest.raises(ValueError):
        periodic(1, [False, False])
    with pytest.raises(ValueError):
        periodic(2, [True, False])


def test_exact_prover_examples():
    prove = exact_prover(single_hole(13))
    even, odd = split(NATURALS)
    assert prove(1, even, odd, ()) is Decision.PROVEN_EVEN

    t = run_dichotomy(exact_prover(multi_hole({5, 13})), max_steps=8)
    assert t.termination.kind.value == "stuck" and t.termination.step == 4

    # brute force: the odd half holds at step 1; the evens split into 0 and 2 mod 4, both failing
    t = run_dichotomy(exact_prover(periodic(1, [False, True])), max_steps=8)
    assert t.decisions == [Decision.PROVEN_ODD]
    assert t.termination.kind.value == "stuck" and t.termination.step == 2


def test_exact_prover_requires_class_query():
    from dichotomy.collatz import collatz_proposition

    with pytest.raises(ValueError):
        exact_prover(collatz_proposition(100))


def test_pull_back_examples():
    P = pull_back(single_hole(27), AffineMap(2, 1))
    assert P.eval(13).kind is TruthKind.FAILS
    assert P.eval(14).kind is TruthKind.HOLDS
    t = run_dichotomy(exact_prover(P), max_steps=10)
    assert candidate_from_trace(t) == 13
    # brute force preimage
    assert [n for n in range(1000) if P.eval(n).kind is TruthKind.FAILS] == [13]


def test_pull_back_of_even_hole_under_odd_map_has_no_holes():
    P = pull_back(single_hole(26), AffineMap(2, 1))
    assert P.holds_on_class(NATURALS) is ALL


def test_pull_back_periodic_matches_pointwise():
    inner = periodic(3, [True, False, True, True, False, True, True, True])
    for a, b in [(1, 0), (3, 5), (2, 1), (4, 7)]:
        P = pull_back(inner, AffineMap(a, b))
        for k in range(3, 6):
            for r in range(1 << k):
                verdict = P.holds_on_class(ResidueClass(k, r))
                pts = {P.eval(r + (1 << k) * x).kind for x in range(40)}
                if verdict is ALL:
                    assert pts == {TruthKind.HOLDS}
                else:
                    assert TruthKind.FAILS in pts


def test_pull_back_preserves_hole_count():
    rng = random.Random(7)
    for _ in range(30):
        holes = set(rng.sample(range(5000), 6))
        f = AffineMap(rng.randint(1, 5), rng.randint(0, 20))
        P = pull_back(multi_hole(holes), f)
        N = 2000
        pulled = [n for n in range(N) if P.eval(n).kind is TruthKind.FAILS]
        preimages = [n for n in range(N) if f(n) in holes]
        assert pulled == preimages
        assert sorted(P.holes) == sorted(x for x in (f.preimage(h) for h in holes) if x is not None)


LIBRARY = [
    single_hole(0),
    single_hole(13),
    single_hole(1000),
    multi_hole({5, 13, 700}),
    multi_hole([]),
    periodic(1, [False, True]),
    periodic(3, [True, True, False, True, True, True, True, False]),
    pull_back(single_hole(27), AffineMap(2, 1)),
    pull_back(periodic(2, [True, False, True, True]), AffineMap(3, 1)),
]


@pytest.mark.parametrize("P", LIBRARY, ids=lambda P: P.name)
def test_class_point_soundness(P):
    rng = random.Random(P.name)
    bound = 1 << 16
    for k in range(0, 11):
        for r in rng.sample(range(1 << k), min(1 << k, 8)):
            c = ResidueClass(k, r)
            verdict = P.holds_on_class(c)
            members = range(r, bound, 1 << k)
            kinds = {P.eval(n).kind for n in members}
            if verdict is ALL:
                assert kinds == {TruthKind.HOLDS}
            elif verdict is SOME:
                assert TruthKind.FAILS in kinds


@pytest.mark.parametrize("m", [0, 1, 2, 13, 255, 256, 4095])
def test_single_hole_tail_is_odd_only(m):
    t = run_dichotomy(exact_prover(single_hole(m)), max_steps=24)
    assert all(d is Decision.PROVEN_ODD for d in t.decisions[m.bit_length():])


@pytest.mark.parametrize(
    "spec, name",
    [
        ("single-hole:13", "single-hole:13"),
        ("multi-hole:13,5", "multi-hole:5,13"),
        ("multi-hole:", "multi-hole:"),
        ("periodic:1:01", "periodic:1:01"),
        ("collatz:500", "collatz:500"),
        ("pullback:affine:2:1:single-hole:27", "pullback:affine:2:1:single-hole:27"),
    ],
)
def test_parse_proposition(spec, name):
    assert parse_proposition(spec).name == name


@pytest.mark.parametrize("spec", ["nope:1", "single-hole:x", "periodic:1:012", "periodic:2:01", "pullback:affine:0:1:single-hole:3"])
def test_parse_proposition_rejects(spec):
    with pytest.raises(ValueError):
        parse_proposition(spec)
