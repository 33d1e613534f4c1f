import random

import pytest
from hypothesis import given, strategies as st

from stratcat import cosheaf as cs
from stratcat.order import FiniteSpace, Poset, alexandrov, iter_posets

LINE = alexandrov(cs.line3())
SIERPINSKI = FiniteSpace.from_opens(["a", "b"], [[], [1], [0, 1]])
SMALL_POSETS = [p for n in range(1, 5) for p in iter_posets(n)]


def broken_line():
    """On the 3-point line, F({-,+}) has a third cosection glued from nothing."""
    sets = {
        frozenset(): (),
        frozenset({0}): ("p",),
        frozenset({2}): ("q",),
        frozenset({0, 2}): ("p", "q", "r"),
        frozenset({0, 1, 2}): ("*",),
    }

    def ext(u, v):
        if u == v:
            return {x: x for x in sets[u]}
        if v == frozenset({0, 2}):
            return {x: x for x in sets[u]}
        return {x: "*" for x in sets[u]}

    return cs.tabulate(LINE, lambda u: sets[u], ext)


@st.composite
def instances(draw, variance="contravariant", max_size=3):
    p = draw(st.sampled_from(SMALL_POSETS))
    rng = random.Random(draw(st.integers(0, 10**6)))
    return rng, p, cs.random_functor(rng, p, max_size, variance)


def test_constant_precosheaf():
    chain = alexandrov(Poset.chain(3))
    assert cs.cosheaf_check(cs.constant_precosheaf(chain)).ok
    # a disconnected open breaks the constant precosheaf
    bad = cs.cosheaf_check(cs.constant_precosheaf(LINE))
    assert not bad.ok and bad.failure.reason == "not-injective"


def test_components_cosheaf_is_cosheaf():
    for y in (cs.two_origins_model(), cs.crossing_lines_model(), cs.identity_over(LINE)):
        assert cs.locally_connected(y.total)
        assert cs.cosheaf_check(cs.components_cosheaf(y)).ok
    ident = cs.components_cosheaf(cs.identity_over(alexandrov(Poset.chain(3))))
    assert all(ident.size(u) == (1 if u else 0) for u in ident.base.opens)


def test_broken_line_witness():
    res = cs.cosheaf_check(broken_line())
    assert not res.ok
    assert res.failure.open == frozenset({0, 2})
    assert res.failure.cover == (frozenset({0}), frozenset({2}))
    assert res.failure.reason == "not-surjective"
    assert res.to_json()["failure"]["cover"] == [[0], [2]]


def test_costalks():
    assert len(cs.costalk(cs.constant_precosheaf(alexandrov(Poset.chain(2))), 0)) == 1
    sets = {frozenset(): (), frozenset({1}): (1, 2), frozenset({0, 1}): ("*",)}
    f = cs.tabulate(SIERPINSKI, lambda u: sets[u], lambda u, v: {x: (x if u == v else "*") for x in sets[u]})
    assert len(cs.costalk(f, 1)) == 2
    assert len(cs.costalk_limit(f, 1)) == 2 and len(cs.costalk_limit(f, 0)) == 1


def test_two_origins_components():
    c = cs.components_cosheaf(cs.two_origins_model())
    assert c.size(LINE.full) == 1
    # the minimal open of the origin sees a single component at finite scale
    assert len(cs.costalk(c, 1)) == 1
    sub, idx = cs.restrict(c, [1])
    assert idx == (1,) and sub.size(sub.base.full) == 1
    r = cs.classify_spread(cs.two_origins_model())
    assert not r.spread and r.complete and not r.uniquely_complete


def test_crossing_lines_components():
    c = cs.components_cosheaf(cs.crossing_lines_model())
    assert [len(cs.costalk(c, x)) for x in range(3)] == [2, 1, 2]
    r = cs.classify_spread(cs.crossing_lines_model())
    assert r.spread and r.uniquely_complete and r.locally_connected


def test_display_of_constant_is_base():
    chain = alexandrov(Poset.chain(3))
    d = cs.display_space(cs.constant_precosheaf(chain))
    assert cs.isomorphic_over(d, cs.identity_over(chain))


def _space_over(total_opens, n_total, base, proj):
    return cs.SpaceOverX(FiniteSpace.from_opens(list(range(n_total)), total_opens), base, proj)


def test_classify_examples():
    r = cs.classify_spread(cs.identity_over(LINE))
    assert r.spread and r.complete and r.uniquely_complete and r.locally_connected
    # two points over the closed point, glued together: uniqueness fails
    y = _space_over([[], [0, 1]], 2, SIERPINSKI, (0, 0))
    r = cs.classify_spread(y)
    assert r.complete and not r.uniquely_complete
    # one point over the open point only: completeness fails over the closed point
    y = _space_over([[], [0]], 1, SIERPINSKI, (1,))
    r = cs.classify_spread(y)
    assert not r.complete and not r.uniquely_complete and r.failures


def test_cosheafify_examples():
    cf = cs.cosheafify(cs.components_cosheaf(cs.crossing_lines_model()))
    assert cs.is_iso(cf.counit, cf.cosheaf, cs.components_cosheaf(cs.crossing_lines_model()))
    chain = alexandrov(Poset.chain(3))
    k = cs.constant_precosheaf(chain)
    assert cs.counit_is_iso(k)
    bad = broken_line()
    fixed = cs.cosheafify(bad).cosheaf
    assert cs.cosheaf_check(fixed).ok
    assert [len(cs.costalk(fixed, x)) for x in range(3)] == [len(cs.costalk(bad, x)) for x in range(3)]
    assert fixed.size(frozenset({0, 2})) == 2
    assert not cs.counit_is_iso(bad)
    with pytest.raises(cs.CosheafError):
        cs.cosheafify(cs.constant_precosheaf(FiniteSpace.discrete(7)))


def test_restrict_examples():
    f = cs.components_cosheaf(cs.crossing_lines_model())
    whole, idx = cs.restrict(f, range(3))
    assert idx == (0, 1, 2)
    assert all(whole[u] == f[u] for u in LINE.opens)
    for x in range(3):
        pt, _ = cs.restrict(f, [x])
        assert pt[pt.base.full] == cs.costalk(f, x)


def test_roundtrip_examples():
    for variance in ("covariant", "contravariant"):
        k = cs.constant_functor(cs.line3(), 1, variance)
        rt = cs.functor_roundtrip(k)
        assert rt.ok and all(r == (0,) for r in rt.iso)
    rt = cs.functor_roundtrip(cs.two_origins_functor())
    assert rt.ok and cs.isomorphic_over(rt.space, cs.two_origins_model())
    rt = cs.functor_roundtrip(cs.crossing_lines_functor())
    assert rt.ok and cs.isomorphic_over(rt.space, cs.crossing_lines_model())
    assert not cs.isomorphic_over(cs.two_origins_model(), cs.crossing_lines_model())
    with pytest.raises(cs.CosheafError):
        cs.functor_roundtrip(cs.constant_functor(Poset.chain(9)))


def test_variance_guards():
    with pytest.raises(cs.CosheafError):
        cs.etale_space(cs.crossing_lines_functor())
    with pytest.raises(cs.CosheafError):
        cs.cosheaf_of_functor(cs.two_origins_functor())
    with pytest.raises(cs.CosheafError):
        cs.PosetFunctor(cs.line3(), ((0,),) * 3, {}, "sideways")


def test_functor_validation():
    p = Poset.chain(3)
    with pytest.raises(cs.CosheafError):
        cs.PosetFunctor.from_generators(p, ((0, 1), (0,), (0,)), {(0, 1): (0, 0)})
    # non-commuting square
    sq = Poset.from_index_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    sets = ((0, 1), (0, 1), (0, 1), (0, 1))
    covers = {(0, 1): (0, 1), (0, 2): (1, 0), (1, 3): (0, 1), (2, 3): (0, 1)}
    with pytest.raises(cs.CosheafError):
        cs.PosetFunctor.from_generators(sq, sets, covers)


def test_precosheaf_validation():
    opens = LINE.opens
    cos = {u: ("*",) if u else () for u in opens}
    with pytest.raises(cs.CosheafError):
        cs.Precosheaf(LINE, cos, {})
    with pytest.raises(cs.CosheafError):
        cs.Precosheaf(LINE, {frozenset(): ()}, {})


def test_json_round_trips():
    f = broken_line()
    g = cs.Precosheaf.from_json(f.to_json())
    assert all(g[u] == f[u] for u in LINE.opens)
    assert all(g.extensions[k] == v for k, v in f.extensions.items())
    with pytest.raises(cs.CosheafError):
        cs.Precosheaf.from_json({**f.to_json(), "extra": 1})
    fn = cs.crossing_lines_functor()
    back = cs.PosetFunctor.from_json(fn.to_json())
    assert back.maps == fn.maps and back.variance == "contravariant"
    y = cs.two_origins_model()
    assert cs.SpaceOverX.from_json(y.to_json()) == y


def test_projection_must_be_continuous():
    with pytest.raises(cs.CosheafError):
        _space_over([[], [0], [0, 1]], 2, SIERPINSKI, (0, 1))


@given(instances())
def test_display_structure(data):
    _, p, g = data
    f = cs.cosheaf_of_functor(g)
    assert cs.cosheaf_check(f).ok
    disp = cs.display(f)
    y = disp.space
    r = cs.classify_spread(y)
    assert r.spread and r.uniquely_complete and r.locally_connected
    assert cs.is_spread_literal(y)
    for x in range(len(p)):
        assert len(y.fibre(x)) == len(cs.costalk(f, x))
    for u in f.base.opens:
        pieces = [disp.basic_open(f, u, a) for a in range(f.size(u))]
        assert all(v and y.total.is_connected(v) for v in pieces)
        assert sum(map(len, pieces)) == len(y.preimage(u))
        assert frozenset().union(*pieces) == y.preimage(u)


@given(instances())
def test_unit_and_counit(data):
    rng, p, g = data
    f = cs.cosheaf_of_functor(g)
    assert cs.counit_is_iso(f)
    assert cs.unit_is_iso(cs.display_space(f))
    pert = cs.perturb(rng, f)
    ok = cs.cosheaf_check(pert).ok
    assert cs.counit_is_iso(pert) == ok
    assert cs.cosheaf_check(pert, exhaustive=True).ok == ok


@given(instances(max_size=2))
def test_universal_property_and_adjunction(data):
    rng, p, g = data
    f = cs.perturb(rng, cs.cosheaf_of_functor(g))
    e = cs.cosheaf_of_functor(cs.random_functor(rng, p, 2, "contravariant"))
    if max(f.max_size(), e.max_size(), cs.cosheafify(f).cosheaf.max_size()) <= 3:
        assert cs.universal_property(f, e)
        assert cs.adjunction_bijection(cs.display_space(e), f)


@given(instances(variance="covariant", max_size=4))
def test_covariant_roundtrip_and_lifts(data):
    rng, p, f = data
    rt = cs.functor_roundtrip(f)
    assert rt.ok
    e = cs.etale_space(f)
    for x in range(len(p)):
        for y in p.up(x):
            for a in range(len(f.sets[x])):
                lifts = cs.chain_lifts(e, f, [x, y], a)
                assert len(lifts) == 1
                assert e.points[lifts[0][1]] == (y, f.maps[(x, y)][a])


@given(instances(variance="contravariant", max_size=4))
def test_contravariant_roundtrip(data):
    _, _, g = data
    assert cs.functor_roundtrip(g).ok


def test_unit_fails_for_non_spreads():
    assert not cs.unit_is_iso(cs.two_origins_model())
    assert cs.unit_is_iso(cs.crossing_lines_model())
