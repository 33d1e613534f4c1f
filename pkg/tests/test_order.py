import itertools
import random

import pytest
from hypothesis import given, strategies as st

from stratcat.order import (
    Compat,
    FiniteSpace,
    OrderError,
    Poset,
    PoSpace,
    Preorder,
    alexandrov,
    all_point_maps,
    compatibility,
    downward_space,
    is_continuous,
    is_homeomorphism,
    is_monotone,
    iter_posets,
    iter_preorders,
    poset_quotient,
    preimage_open_check,
    random_poset,
    specialisation,
    stratified_map_check,
)


def preorders(max_n=5):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
        return Preorder.from_index_pairs(n, pairs)

    return build()


def subsets(n):
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]


def test_sierpinski_specialisation():
    s = FiniteSpace.from_opens(["a", "b"], [[], [1], [0, 1]])
    p = specialisation(s)
    assert p.le(0, 1) and not p.le(1, 0)


def test_discrete_specialisation_is_discrete():
    p = specialisation(FiniteSpace.discrete(3))
    assert p.leq == Preorder.discrete(3).leq


def test_chain_opens():
    opens = alexandrov(Preorder.chain(3)).opens
    assert set(opens) == {frozenset(), frozenset({2}), frozenset({1, 2}), frozenset({0, 1, 2})}


def test_discrete_order_gives_discrete_topology():
    assert set(alexandrov(Preorder.discrete(3)).opens) == set(subsets(3))


def test_pseudocircle_opens_match_brute_force():
    p = Poset.pseudocircle()
    brute = {u for u in subsets(4) if all(p.up(x) <= u for x in u)}
    assert set(alexandrov(p).opens) == brute
    assert len(brute) == 7
    names = {frozenset(p.elements[i] for i in u) for u in brute if u}
    assert names == {frozenset(s) for s in ["c", "d", "cd", "acd", "bcd", "abcd"]}


def test_open_family_axioms_rejected():
    with pytest.raises(OrderError):
        FiniteSpace.from_opens([0, 1], [[0, 1], [0]])
    with pytest.raises(OrderError):
        FiniteSpace.from_opens([0, 1, 2], [[], [0], [1], [0, 1, 2]])


def test_downward_space_examples():
    assert set(downward_space(Preorder.chain(2)).opens) == set(alexandrov(Preorder.chain(2)).opens)
    d = downward_space(Preorder.discrete(2))
    assert all(d.is_closed(s) for s in subsets(2))


def test_poset_quotient_examples():
    sym = Preorder.from_index_pairs(2, [(0, 1), (1, 0)])
    q, m = poset_quotient(sym)
    assert len(q) == 1 and m == (0, 0)
    p = Poset.pseudocircle()
    q, m = poset_quotient(p)
    assert q.leq == p.leq and m == (0, 1, 2, 3)
    # two symmetric pairs, one below the other
    four = Preorder.from_index_pairs(4, [(0, 1), (1, 0), (2, 3), (3, 2), (0, 2)])
    q, m = poset_quotient(four)
    assert len(q) == 2 and m[0] == m[1] != m[2] == m[3]
    assert q.le(m[0], m[2]) and not q.le(m[2], m[0])


def test_compatibility_examples():
    chain = Preorder.chain(3)
    assert compatibility(PoSpace.alexandrov(chain)).kind is Compat.C2
    disc = PoSpace(FiniteSpace.discrete(2), Preorder.chain(2))
    assert compatibility(disc).kind is Compat.C2
    interval = PoSpace(FiniteSpace.from_opens([0, 1], [[], [0], [0, 1]]), Preorder.chain(2))
    # the suggested finite interval fails both conditions
    assert compatibility(interval).kind is Compat.NONE


def test_c1_without_c2_never_happens_for_small_spaces():
    # finite spaces satisfy: all down-sets closed iff all up-sets open
    for n in range(1, 4):
        for order in iter_preorders(n):
            for space_order in iter_preorders(n):
                space = alexandrov(space_order)
                assert compatibility(PoSpace(space, order)).kind is not Compat.C1


def test_compatibility_reports_strata():
    c = compatibility(PoSpace.alexandrov(Preorder.from_index_pairs(3, [(0, 1), (1, 0), (1, 2)])))
    assert c.kind is Compat.C2
    assert set(c.strata) == {frozenset({0, 1}), frozenset({2})}
    assert len(c.strata_poset) == 2


def test_stratified_map_examples():
    x = PoSpace.alexandrov(Preorder.chain(3))
    assert stratified_map_check((0, 1, 2), x, x).g == (0, 1, 2)
    pt = PoSpace.alexandrov(Preorder.chain(1))
    assert stratified_map_check((0, 0, 0), x, pt).g == (0, 0, 0)
    order = Preorder.from_index_pairs(4, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)])
    xs = PoSpace.alexandrov(order)
    q, sigma = poset_quotient(order)
    assert stratified_map_check(sigma, xs, PoSpace.alexandrov(q)).g == (0, 1)
    assert stratified_map_check((2, 1, 0), x, x).failure == "not-continuous"


def test_stratified_map_failures():
    x = PoSpace.alexandrov(Preorder.from_index_pairs(2, [(0, 1), (1, 0)]))
    y = PoSpace(FiniteSpace.from_opens([0, 1], [[], [0, 1]]), Preorder.discrete(2))
    assert stratified_map_check((0, 1), x, y).failure == "splits-stratum"
    # continuous map into an indiscrete space whose order is not reflected
    src = PoSpace.alexandrov(Preorder.chain(2))
    tgt = PoSpace(FiniteSpace.from_opens([0, 1], [[], [0, 1]]), Preorder.from_index_pairs(2, [(1, 0)]))
    assert stratified_map_check((0, 1), src, tgt).failure == "g-not-increasing"
    with pytest.raises(OrderError):
        stratified_map_check((0,), src, tgt)


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 5), (4, 16), (5, 63)])
def test_poset_counts(n, count):
    assert sum(1 for _ in iter_posets(n)) == count


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 9), (4, 33)])
def test_preorder_counts(n, count):
    assert sum(1 for _ in iter_preorders(n)) == count


def test_round_trip_exhaustive():
    for n in range(1, 6):
        for p in iter_preorders(n) if n <= 4 else iter_posets(n):
            assert specialisation(alexandrov(p)).leq == p.leq
            assert specialisation(downward_space(p)).leq == p.leq
            assert set(downward_space(p).opens) == set(alexandrov(p).opens)


@given(preorders(7))
def test_round_trip_random(p):
    assert specialisation(alexandrov(p)).leq == p.leq


@given(preorders(5))
def test_adjunction_counit(p):
    space = alexandrov(p)
    # any space on these points whose opens are a sub-family of Alexandrov opens
    opens = [u for u in space.opens if len(u) % 2 == 0] + [frozenset(), space.full]
    closure = set(opens)
    changed = True
    while changed:
        changed = False
        for u, v in itertools.combinations(list(closure), 2):
            for w in (u | v, u & v):
                if w not in closure:
                    closure.add(w)
                    changed = True
    x = FiniteSpace.from_opens(space.points, closure)
    ident = tuple(range(len(x)))
    a = alexandrov(specialisation(x))
    assert is_continuous(ident, a, x)
    assert is_homeomorphism(ident, a, x) == (set(a.opens) == set(x.opens))


def test_monotone_iff_continuous():
    rng = random.Random(3)
    for _ in range(40):
        p, q = random_poset(rng, rng.randint(1, 4)), random_poset(rng, rng.randint(1, 3))
        for f in all_point_maps(len(p), len(q)):
            cont = is_continuous(f, alexandrov(p), alexandrov(q))
            assert is_monotone(f, p, q) == cont == preimage_open_check(f, alexandrov(p), alexandrov(q))


@given(preorders(5))
def test_c2_implies_c1_and_local_connectivity(p):
    ps = PoSpace.alexandrov(p)
    space = ps.space
    assert all(space.is_open(p.up(x)) for x in range(len(p)))
    assert all(space.is_closed(p.down(x)) for x in range(len(p)))
    for x in range(len(p)):
        assert space.is_connected(space.minimal_open(x))


def test_json_round_trip():
    p = Poset.pseudocircle()
    assert Preorder.from_json(p.to_json()).leq == p.leq
    s = alexandrov(p)
    t = FiniteSpace.from_json(s.to_json())
    assert set(t.opens) == set(s.opens)
    payload = s.to_json()
    assert set(payload) == {"points", "opens"}
    assert set(p.to_json()) == {"elements", "leq"}
