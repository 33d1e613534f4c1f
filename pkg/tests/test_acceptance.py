"""One test per acceptance criterion.  Each prints a single PASS/FAIL line
(also collected into the terminal summary)."""

import random
import time
from contextlib import contextmanager

import pytest

from stratcat import category as cat
from stratcat import cosheaf as cs
from stratcat import oracles as orc
from stratcat import symprod as sp
from stratcat.groups import Inconclusive, abelianization, coset_enumerate
from stratcat.order import Poset, iter_posets, random_poset

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(k: int, title: str, budget: float):
    t0 = time.perf_counter()
    status, note = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - t0
        if elapsed >= budget:
            note = f"over budget ({elapsed:.1f}s >= {budget:.0f}s)"
            raise AssertionError(note)
        status = "PASS"
    except BaseException as exc:
        note = note or f"{type(exc).__name__}: " + " ".join(str(exc).split())[:120]
        raise
    finally:
        elapsed = time.perf_counter() - t0
        line = f"ACCEPTANCE {k}: {status} {title} [{elapsed:.2f}s / {budget:.0f}s]" + (f" {note}" if note else "")
        print(line)
        ACCEPTANCE_LINES.append(line)


def assert_report(rep: orc.OracleReport, *names: str, minimum: dict | None = None):
    assert rep.ok, rep.failures
    for name in names:
        assert name in rep.checks, f"missing check {name}"
    for name, count in (minimum or {}).items():
        assert rep.checks[name][1] >= count, f"{name} ran {rep.checks[name][1]} < {count}"


def test_1_poset_fundamental_category():
    with criterion(1, "poset hom-existence equals <= (|P| <= 5)", 10):
        rng = random.Random(1)
        count = 0
        for n in range(1, 6):
            for p in iter_posets(n):
                assert cat.poset_category(p).hom == p.leq
                count += 1
        for _ in range(500):
            p = random_poset(rng, 5, rng.uniform(0.1, 0.7))
            thin = cat.poset_category(p)
            assert all(thin.hom[x][y] == p.le(x, y) for x in range(5) for y in range(5))
        assert count == 1 + 2 + 5 + 16 + 63


def test_2_real_projective_space():
    with criterion(2, "RP^n vertex group order 2 (n=2,3,4), RP^1 free rank 1", 5):
        for n in (2, 3, 4):
            assert coset_enumerate(cat.localize_vertex_group(cat.rp_skeleton(n)), 1000) == 2
        g1 = cat.localize_vertex_group(cat.rp_skeleton(1))
        ab = abelianization(g1)
        assert ab.rank == 1 and ab.torsion == ()
        with pytest.raises(Inconclusive):
            coset_enumerate(g1, 1000)


def test_3_groupoidification():
    with criterion(3, "localized abelianization equals order-complex H1 (|P| <= 6)", 60):
        checked = 0
        for n in range(1, 7):
            for p in iter_posets(n):
                if not orc.is_connected_poset(p):
                    continue
                mine = abelianization(cat.localize_vertex_group(cat.present_poset(p)))
                assert mine == orc.order_complex_h1(p), p.to_json()
                checked += 1
        pc = abelianization(cat.localize_vertex_group(cat.present_poset(Poset.pseudocircle())))
        assert pc.rank == 1 and pc.torsion == ()
        assert checked == 1 + 1 + 3 + 10 + 44 + 238


def test_4_braid_word_problem():
    with criterion(4, "equal <=> artin_equal on 10^4 pairs per n=3..6", 120):
        rep = orc.braid_word_problem(seed=4, pairs=10_000)
        assert_report(rep, minimum={f"word_problem.n{n}": 10_000 for n in (3, 4, 5, 6)})


def test_5_parabolic_membership():
    with criterion(5, "parabolic membership agrees with strand-deletion oracle (10^3 per n <= 6)", 120):
        rep = orc.parabolic_membership(seed=5, samples=1000, ns=(1, 2, 3, 4, 5, 6))
        assert_report(rep, minimum={f"membership.n{n}": 1000 for n in range(1, 7)})
        assert all(rep.checks[f"planted.n{n}"][1] >= 500 for n in range(2, 7))


def test_6_double_cosets():
    with criterion(6, "double cosets match brute force (n <= 5); (3|2),(2|1|1|1) gives 2", 60):
        rep = orc.OracleReport("pi0")
        orc.double_coset_check(rep, 5)
        assert_report(rep, "double_cosets", "pattern_roundtrip")
        p, q = sp.AbstractPartition.of([3, 2]), sp.AbstractPartition.of([2, 1, 1, 1])
        assert len(sp.double_cosets(p, q)) == 2 == len(sp.brute_force_double_cosets(p, q))


def test_7_hom_set_structure():
    with criterion(7, "hom_equal equivalence, composition well defined, pi0 surjective, top stratum = B_n", 120):
        rng = random.Random(7)
        rep = orc.OracleReport("hom")
        orc.hom_structure_check(rep, rng, 1000, 5)
        orc.hom_equivalence_check(rep, rng, 200, 5)
        orc.discrete_hom_check(rep, rng, 1000, 5)
        assert_report(
            rep,
            minimum={"compose_well_defined": 1000, "hom_equal_equivalence": 200, "top_stratum_is_braid_group": 1000},
        )
        for n in range(1, 6):
            for p, q in orc.refinement_pairs(n):
                pats = sp.double_cosets(p, q)
                assert {sp.project_pi0(sp.realize(d)) for d in pats} == set(pats)


def test_8_branched_cover():
    with criterion(8, "branched cover counts n!/prod p_i! (n <= 5), functorial on 10^2 pairs (n <= 4)", 60):
        rep = orc.OracleReport("cover")
        orc.cover_count_check(rep, 5)
        orc.cover_functoriality_check(rep, random.Random(8), 100, 4)
        assert_report(rep, minimum={"cover_counts": 1 + 2 + 3 + 5 + 7, "cover_functorial": 100})


def test_9_cosheaves_and_display():
    with criterion(9, "display is an lc uniquely-complete spread; V_a connected; C(D(F)) = F, D(C(Y)) = Y; universal property", 120):
        rep = orc.OracleReport("cosheaf")
        rng = random.Random(9)
        for n in range(1, 6):
            for p in iter_posets(n):
                for _ in range(6):
                    orc.cosheaf_instance_checks(rep, rng, p, 3, small=True)
        assert_report(
            rep,
            "is_cosheaf",
            "display_is_lc_uc_spread",
            "basic_opens",
            "counit_iso",
            "unit_iso",
            "universal_property",
            "adjunction",
            minimum={"display_is_lc_uc_spread": 6 * 87, "universal_property": 100},
        )


def test_10_representation_round_trips():
    with criterion(10, "covariant and contravariant round trips (10^2 instances, |P| <= 6, sets <= 4); figure models exact", 120):
        rng = random.Random(10)
        rep = orc.OracleReport("roundtrip")
        for _ in range(100):
            n = rng.randint(1, 6)
            p = random_poset(rng, n, rng.uniform(0.2, 0.7))
            orc.roundtrip_checks(rep, rng, p, 4)
        orc.named_model_checks(rep)
        assert_report(
            rep,
            "two_origins_model",
            "crossing_lines_model",
            minimum={"roundtrip_covariant": 100, "roundtrip_contravariant": 100},
        )
        rt = cs.functor_roundtrip(cs.two_origins_functor())
        assert cs.isomorphic_over(rt.space, cs.two_origins_model())
        rt = cs.functor_roundtrip(cs.crossing_lines_functor())
        assert cs.isomorphic_over(rt.space, cs.crossing_lines_model())
