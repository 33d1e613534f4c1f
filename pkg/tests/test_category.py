import pytest

from stratcat.category import (
    Arrow,
    CategoryError,
    FinPresCategory,
    SignedSkeleton,
    ThinCategory,
    hom_classes,
    localize_vertex_group,
    poset_category,
    present_poset,
    rp_skeleton,
)
from stratcat.groups import Inconclusive, abelianization, coset_enumerate
from stratcat.oracles import is_connected_poset, order_complex_h1
from stratcat.order import Poset, iter_posets

SQUARE = Poset.from_index_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


def test_poset_category_examples():
    assert poset_category(Poset.chain(3)).morphism_count() == 6
    assert poset_category(Poset.discrete(4)).morphism_count() == 4
    assert poset_category(Poset.pseudocircle()).morphism_count() - 4 == 4


def test_thin_category_validation():
    with pytest.raises(CategoryError):
        ThinCategory((0, 1), ((False, False), (False, True)))
    with pytest.raises(CategoryError):
        ThinCategory((0, 1, 2), ((True, True, False), (False, True, True), (False, False, True)))


def test_hom_is_order_for_all_small_posets():
    for n in range(1, 6):
        for p in iter_posets(n):
            c = poset_category(p)
            assert c.hom == p.leq


def test_present_poset_examples():
    chain = present_poset(Poset.chain(2))
    assert len(chain.arrows) == 1 and chain.relations == ()
    sq = present_poset(SQUARE)
    assert len(sq.arrows) == 4 and len(sq.relations) == 1
    u, v = sq.relations[0]
    assert len(u) == len(v) == 2
    pc = present_poset(Poset.pseudocircle())
    assert len(pc.arrows) == 4 and pc.relations == ()
    with pytest.raises(CategoryError):
        present_poset(Poset.chain(13))


def test_present_poset_is_thin_up_to_six():
    for n in range(1, 7):
        for p in iter_posets(n):
            cat = present_poset(p)
            for x in range(n):
                for y in range(n):
                    classes = hom_classes(cat, x, y)
                    assert len(classes) == int(p.leq[x][y])


def test_rp_skeleton_examples():
    one = rp_skeleton(1)
    assert len(one.arrows) == 2 and one.relations == ()
    two = rp_skeleton(2)
    assert len(two.arrows) == 4 and len(two.relations) == 2
    assert len(hom_classes(two, 0, 2)) == 2
    with pytest.raises(CategoryError):
        rp_skeleton(0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_rp_skeleton_hom_classes_and_group(n):
    cat = rp_skeleton(n)
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            classes = hom_classes(cat, i, j)
            assert len(classes) == 2
            signs = [{SignedSkeleton.sign(w) for w in cls} for cls in classes]
            assert sorted(map(tuple, signs)) == [(-1,), (1,)]
    g = localize_vertex_group(cat)
    assert coset_enumerate(g, 1000) == 2
    assert abelianization(g).to_json() == {"torsion": [2], "rank": 0}


def test_signed_skeleton():
    sk = SignedSkeleton(3)
    assert sk.hom(0, 2) == {1, -1} and sk.hom(1, 1) == {1} and sk.hom(2, 0) == frozenset()
    assert sk.compose(-1, -1) == 1


def test_rp1_is_infinite_cyclic():
    g = localize_vertex_group(rp_skeleton(1))
    assert abelianization(g).to_json() == {"torsion": [], "rank": 1}
    with pytest.raises(Inconclusive):
        coset_enumerate(g, 1000)


def test_localization_examples():
    g = localize_vertex_group(present_poset(Poset.chain(2)))
    assert coset_enumerate(g, 10) == 1
    pc = localize_vertex_group(present_poset(Poset.pseudocircle()))
    assert abelianization(pc).rank == 1 and abelianization(pc).torsion == ()
    # four edges, four vertices, no relations: free of rank one
    assert len(pc.generators) - len(pc.relators) == 1
    with pytest.raises(CategoryError):
        localize_vertex_group(present_poset(Poset.discrete(2)))
    with pytest.raises(CategoryError):
        localize_vertex_group(present_poset(Poset.chain(2)), base=5)


def test_localization_matches_order_complex_up_to_five():
    for n in range(1, 6):
        for p in iter_posets(n):
            if not is_connected_poset(p):
                continue
            ab = abelianization(localize_vertex_group(present_poset(p)))
            assert ab == order_complex_h1(p)


def test_fin_pres_validation_and_json():
    with pytest.raises(CategoryError):
        FinPresCategory((0, 1), (Arrow("a", 0, 1), Arrow("a", 1, 0)))
    with pytest.raises(CategoryError):
        FinPresCategory((0,), (Arrow("a", 0, 3),))
    with pytest.raises(CategoryError):
        FinPresCategory((0, 1), (Arrow("a", 0, 1), Arrow("b", 1, 0)), ((("a",), ("b",)),))
    with pytest.raises(CategoryError):
        FinPresCategory((0, 1), (Arrow("a", 0, 1),), ((("a",), ()),))
    cat = rp_skeleton(2)
    again = FinPresCategory.from_json(cat.to_json())
    assert again == cat
    with pytest.raises(CategoryError):
        FinPresCategory.from_json({"objects": []})


def test_loops_raise_inconclusive():
    loop = FinPresCategory((0,), (Arrow("t", 0, 0),))
    with pytest.raises(Inconclusive):
        hom_classes(loop, 0, 0, cap=4)
