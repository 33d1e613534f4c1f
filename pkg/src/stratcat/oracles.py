"""Independent cross-checks, grouped into suites.

Each suite compares a fast implementation against a slow or differently
derived one and tallies agreements.  Everything is driven by an explicit
seed so reruns are byte-identical.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors

from . import braid as br
from . import category as cat
from . import cosheaf as cs
from . import symprod as sp
from .config import OracleConfig
from .groups import Abelianization, abelianization
from .order import Poset, alexandrov, iter_posets, random_poset, specialisation


@dataclass
class OracleReport:
    suite: str
    checks: dict[str, list[int]] = field(default_factory=dict)  # name -> [passed, total]
    failures: list[str] = field(default_factory=list)

    def record(self, name: str, ok: bool, detail: str = "") -> bool:
        tally = self.checks.setdefault(name, [0, 0])
        tally[1] += 1
        if ok:
            tally[0] += 1
        elif len(self.failures) < 20:
            self.failures.append(f"{name}: {detail}")
        return ok

    @property
    def ok(self) -> bool:
        return all(p == t for p, t in self.checks.values())

    def merge(self, other: OracleReport) -> OracleReport:
        for k, (p, t) in other.checks.items():
            tally = self.checks.setdefault(f"{other.suite}.{k}", [0, 0])
            tally[0] += p
            tally[1] += t
        self.failures += [f"{other.suite}.{f}" for f in other.failures]
        return self

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "checks": {k: {"passed": p, "total": t} for k, (p, t) in sorted(self.checks.items())},
            "failures": list(self.failures),
        }


# ---------------------------------------------------------------------------
# braids


def scramble(rng: random.Random, w: br.BraidWord, moves: int) -> br.BraidWord:
    """Apply random braid-group rewrites: cancelling pairs, far commutations
    and the braid relation."""
    letters = list(w.letters)
    n = w.n
    if n < 2:
        return w
    for _ in range(moves):
        kind = rng.random()
        if kind < 0.3 or len(letters) < 3:
            i, s = rng.randint(1, n - 1), rng.choice((1, -1))
            pos = rng.randint(0, len(letters))
            letters[pos:pos] = [(i, s), (i, -s)]
            continue
        pos = rng.randrange(len(letters) - 1)
        (i, s), (j, t) = letters[pos], letters[pos + 1]
        if abs(i - j) >= 2:
            letters[pos], letters[pos + 1] = letters[pos + 1], letters[pos]
        elif pos + 2 < len(letters):
            (k, u) = letters[pos + 2]
            if i == k and abs(i - j) == 1 and s == t == u:
                letters[pos : pos + 3] = [(j, s), (i, s), (j, s)]
    return br.BraidWord(n, tuple(letters))


def braid_pairs(rng: random.Random, n: int, count: int, max_len: int = 30):
    """Pairs of words of length at most ``max_len``: half planted equal,
    half independent (or a single-letter perturbation)."""
    for k in range(count):
        u = br.random_word(rng, n, rng.randint(0, max_len - 10))
        if k % 2 == 0:
            v = scramble(rng, u, rng.randint(1, 8))
            if len(v) > max_len:
                v = u
        elif k % 4 == 1:
            v = br.random_word(rng, n, rng.randint(0, max_len))
        else:
            pos = rng.randint(0, len(u))
            extra = ((rng.randint(1, n - 1), rng.choice((1, -1))),)
            v = scramble(rng, br.BraidWord(n, u.letters[:pos] + extra + u.letters[pos:]), 3)
            if len(v) > max_len:
                v = br.BraidWord(n, u.letters[:pos] + extra + u.letters[pos:])
        yield u, v


def braid_word_problem(seed: int, pairs: int, ns=(3, 4, 5, 6), max_len: int = 30) -> OracleReport:
    rep = OracleReport("braid")
    rng = random.Random(seed)
    for n in ns:
        for u, v in braid_pairs(rng, n, pairs, max_len):
            a, b = br.equal(u, v), br.artin_equal(u, v)
            rep.record(f"word_problem.n{n}", a == b, f"{u} vs {v}: garside={a} artin={b}")
    return rep


def random_composition(rng: random.Random, n: int) -> list[int]:
    cuts = sorted(rng.sample(range(1, n), rng.randint(0, n - 1)))
    bounds = [0] + cuts + [n]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def parabolic_samples(rng: random.Random, n: int, count: int, max_len: int = 20):
    """``(word, sizes, planted)`` with planted members, planted non-members and
    random words."""
    for k in range(count):
        sizes = random_composition(rng, n)
        member = br.random_block_word(rng, sizes, rng.randint(0, max_len))
        kind = k % 4
        if kind == 0:
            yield member, sizes, True
        elif kind == 1 and len(sizes) > 1:
            # a pure braid linking two blocks: permutation test passes, membership fails
            edge = rng.choice(list(itertools.accumulate(sizes[:-1])))
            bad = br.BraidWord(n, ((edge, 1), (edge, 1)))
            w = br.random_block_word(rng, sizes, 4) * bad * member
            yield w, sizes, False
        elif kind == 2:
            yield br.random_word(rng, n, rng.randint(0, max_len)), sizes, None
        else:
            yield scramble(rng, member, 5), sizes, True


def parabolic_membership(seed: int, samples: int, ns=(2, 3, 4, 5, 6)) -> OracleReport:
    rep = OracleReport("parabolic")
    rng = random.Random(seed)
    for n in ns:
        for w, sizes, planted in parabolic_samples(rng, n, samples):
            blocks = br.blocks_from_sizes(sizes)
            a, b = br.parabolic_member(w, blocks), br.parabolic_member_oracle(w, blocks)
            rep.record(f"membership.n{n}", a == b, f"{w} blocks {sizes}: nf={a} oracle={b}")
            if planted is not None:
                rep.record(f"planted.n{n}", a == planted, f"{w} blocks {sizes}: expected {planted}")
    return rep


def braid_suite(seed: int = 0, pairs: int = 1000) -> OracleReport:
    rep = OracleReport("braid")
    rep.merge(braid_word_problem(seed, pairs))
    rep.merge(parabolic_membership(seed + 1, max(pairs // 10, 10)))
    return rep


# ---------------------------------------------------------------------------
# posets and localization


def order_complex_h1(p: Poset) -> Abelianization:
    """First homology of the order complex of a connected poset from its
    edge-path group: edges ``x < y``, spanning-tree edges killed, one relation
    ``e_xy e_yz = e_xz`` per 2-simplex.  Diagonalised by sympy."""
    n = len(p)
    edges = [(x, y) for x in range(n) for y in range(n) if x != y and p.leq[x][y]]
    index = {e: k for k, e in enumerate(edges)}
    # depth-first spanning tree of the comparability graph
    seen, tree, stack = {0}, [], [0]
    while stack:
        x = stack.pop()
        for k, (a, b) in enumerate(edges):
            other = b if a == x else a if b == x else None
            if other is not None and other not in seen:
                seen.add(other)
                tree.append(k)
                stack.append(other)
    if len(seen) != n:
        raise ValueError("order complex oracle needs a connected poset")
    rows = []
    for k in tree:
        row = [0] * len(edges)
        row[k] = 1
        rows.append(row)
    for x, y, z in itertools.permutations(range(n), 3):
        if (x, y) in index and (y, z) in index:
            row = [0] * len(edges)
            row[index[(x, y)]] += 1
            row[index[(y, z)]] += 1
            row[index[(x, z)]] -= 1
            rows.append(row)
    if not edges:
        return Abelianization((), 0)
    if not rows:
        return Abelianization((), len(edges))
    factors = [abs(int(d)) for d in invariant_factors(Matrix(rows)) if d != 0]
    return Abelianization(tuple(d for d in factors if d > 1), len(edges) - len(factors))


def is_connected_poset(p: Poset) -> bool:
    return alexandrov(p).is_connected()


def poset_samples(rng: random.Random, n_max: int, random_per_size: int = 0):
    """All posets up to isomorphism with at most ``n_max`` elements, then
    random labelled ones."""
    for n in range(1, n_max + 1):
        yield from iter_posets(n)
    for _ in range(random_per_size):
        yield random_poset(rng, n_max, rng.uniform(0.2, 0.6))


def poset_suite(seed: int = 0, n_max: int = 5, localize_max: int = 6) -> OracleReport:
    rep = OracleReport("poset")
    rng = random.Random(seed)
    for p in poset_samples(rng, n_max, 50):
        n = len(p)
        thin = cat.poset_category(p)
        special = specialisation(alexandrov(p))
        rep.record("hom_is_order", thin.hom == p.leq == special.leq, f"{p.to_json()}")
        pres = cat.present_poset(p)
        ok = all(
            len(cat.hom_classes(pres, x, y)) == (1 if p.leq[x][y] else 0) for x in range(n) for y in range(n)
        )
        rep.record("presentation_thin", ok, f"{p.to_json()}")
    for m in range(1, localize_max + 1):
        for p in iter_posets(m):
            if not is_connected_poset(p):
                continue
            mine = abelianization(cat.localize_vertex_group(cat.present_poset(p)))
            theirs = order_complex_h1(p)
            rep.record("localization_h1", mine == theirs, f"{p.to_json()}: {mine} vs {theirs}")
    return rep


# ---------------------------------------------------------------------------
# symmetric products


def refinement_pairs(n: int):
    for p in sp.partitions(n):
        for q in sp.partitions(n):
            if sp.refines(p, q):
                yield p, q


def double_coset_check(rep: OracleReport, n_max: int) -> None:
    for n in range(1, n_max + 1):
        for p, q in refinement_pairs(n):
            orbits = sp.brute_force_double_cosets(p, q)
            pats = sp.double_cosets(p, q)
            same = {sp.pattern_of_permutation(next(iter(o)), p, q) for o in orbits} == {d.splits for d in pats}
            rep.record("double_cosets", len(orbits) == len(pats) and same, f"{p} {q}: {len(orbits)} vs {len(pats)}")
            rep.record(
                "pattern_roundtrip",
                all(sp.project_pi0(sp.realize(d)) == d for d in pats),
                f"{p} {q}",
            )


def random_triple(rng: random.Random, n_max: int):
    n = rng.randint(1, n_max)
    p = sp.random_partition(rng, n)
    q = sp.random_refinement(rng, p)
    r = sp.random_refinement(rng, q)
    return p, q, r


def hom_structure_check(rep: OracleReport, rng: random.Random, trials: int, n_max: int) -> None:
    for _ in range(trials):
        p, q, r = random_triple(rng, n_max)
        m, m2 = sp.random_morphism(rng, p, q), sp.random_morphism(rng, q, r)
        i, j = sp.random_internal(rng, p), sp.random_internal(rng, q)
        moved = sp.compose(sp.HomMorphism(p, q, i * m.braid), sp.HomMorphism(q, r, j * m2.braid))
        rep.record("compose_well_defined", sp.hom_equal(moved, sp.compose(m, m2)), f"{p} {q} {r}")
        r3 = sp.random_refinement(rng, r)
        m3 = sp.random_morphism(rng, r, r3)
        left = sp.compose(sp.compose(m, m2), m3)
        right = sp.compose(m, sp.compose(m2, m3))
        rep.record("associative", sp.hom_equal(left, right), f"{p} {q} {r} {r3}")
        same = sp.HomMorphism(p, q, sp.random_internal(rng, p) * m.braid)
        rep.record("pi0_constant_on_classes", sp.project_pi0(same) == sp.project_pi0(m), f"{p} {q}")
        other = sp.random_morphism(rng, p, q)
        if sp.project_pi0(other) == sp.project_pi0(m):
            e = sp.exactness_witness(m, other)
            ok = sp.hom_equal(sp.HomMorphism(p, q, m.braid * e), other)
            rep.record("exactness_witness", ok, f"{p} {q}")


def hom_equivalence_check(rep: OracleReport, rng: random.Random, trials: int, n_max: int) -> None:
    """Reflexive, symmetric, transitive on small sampled sets (with planted
    equal representatives so the relation is not trivially empty)."""
    for _ in range(trials):
        p, q, _ = random_triple(rng, n_max)
        base = [sp.random_morphism(rng, p, q, length=3) for _ in range(3)]
        ms = base + [sp.HomMorphism(p, q, sp.random_internal(rng, p) * b.braid) for b in base]
        eq = [[sp.hom_equal(a, b) for b in ms] for a in ms]
        k = len(ms)
        refl = all(eq[a][a] for a in range(k))
        sym = all(eq[a][b] == eq[b][a] for a in range(k) for b in range(k))
        trans = all(not (eq[a][b] and eq[b][c]) or eq[a][c] for a in range(k) for b in range(k) for c in range(k))
        rep.record("hom_equal_equivalence", refl and sym and trans, f"{p} {q}")


def discrete_hom_check(rep: OracleReport, rng: random.Random, trials: int, n_max: int) -> None:
    """On the top stratum, classes are braids."""
    for _ in range(trials):
        n = rng.randint(2, n_max)
        d = sp.AbstractPartition.discrete(n)
        u = br.random_word(rng, n, rng.randint(0, 12))
        v = scramble(rng, u, 4) if rng.random() < 0.5 else br.random_word(rng, n, rng.randint(0, 12))
        a = sp.hom_equal(sp.HomMorphism(d, d, u), sp.HomMorphism(d, d, v))
        rep.record("top_stratum_is_braid_group", a == br.equal(u, v), f"{u} vs {v}")


def cover_count_check(rep: OracleReport, n_max: int) -> None:
    for n in range(1, n_max + 1):
        cover = sp.branched_cover(n)
        for p in sp.partitions(n):
            expected = math.factorial(n) // math.prod(math.factorial(x) for x in p.parts)
            rep.record("cover_counts", len(cover.fibre(p)) == expected, f"{p}")


def cover_functoriality_check(rep: OracleReport, rng: random.Random, trials: int, n_max: int) -> None:
    for _ in range(trials):
        p, q, r = random_triple(rng, n_max)
        cover = sp.branched_cover(p.n)
        m, m2 = sp.random_morphism(rng, p, q), sp.random_morphism(rng, q, r)
        fm, fm2, fmm = cover.on_morphism(m), cover.on_morphism(m2), cover.on_morphism(sp.compose(m, m2))
        ok = all(fm[fm2[lab]] == fmm[lab] for lab in cover.fibre(r))
        rep.record("cover_functorial", ok, f"{p} {q} {r}")
        ident = cover.on_morphism(sp.identity_morphism(q))
        rep.record("cover_identity", all(k == v for k, v in ident.items()), f"{q}")
        moved = sp.HomMorphism(p, q, sp.random_internal(rng, p) * m.braid)
        rep.record("cover_on_classes", cover.on_morphism(moved) == fm, f"{p} {q}")


def spn_suite(seed: int = 0, n_max: int = 5, trials: int = 200) -> OracleReport:
    rep = OracleReport("spn")
    rng = random.Random(seed)
    double_coset_check(rep, n_max)
    hom_structure_check(rep, rng, trials, n_max)
    hom_equivalence_check(rep, rng, max(trials // 10, 5), n_max)
    discrete_hom_check(rep, rng, trials, n_max)
    cover_count_check(rep, n_max)
    cover_functoriality_check(rep, rng, max(trials // 2, 10), min(n_max, 4))
    return rep


# ---------------------------------------------------------------------------
# cosheaves


def display_structure_ok(f: cs.Precosheaf) -> bool:
    """Basic opens of a cosheaf are non-empty and connected, and each
    preimage ``p^-1 U`` is their disjoint union."""
    disp = cs.display(f)
    total = disp.space.total
    for u in f.base.opens:
        pieces = [disp.basic_open(f, u, a) for a in range(f.size(u))]
        if any(not v or not total.is_connected(v) for v in pieces):
            return False
        if sum(map(len, pieces)) != len(disp.space.preimage(u)) or frozenset().union(*pieces) != disp.space.preimage(u):
            return False
    return all(
        len(disp.space.fibre(x)) == len(cs.costalk(f, x)) for x in range(len(f.base))
    )


def cosheaf_instance_checks(rep: OracleReport, rng: random.Random, p: Poset, max_size: int, small: bool) -> None:
    g = cs.random_functor(rng, p, max_size, "contravariant")
    f = cs.cosheaf_of_functor(g)
    label = f"{p.to_json()}"
    rep.record("is_cosheaf", cs.cosheaf_check(f).ok, label)
    d = cs.display_space(f)
    r = cs.classify_spread(d)
    rep.record("display_is_lc_uc_spread", r.spread and r.uniquely_complete and r.locally_connected, label)
    rep.record("basic_opens", display_structure_ok(f), label)
    rep.record("counit_iso", cs.counit_is_iso(f), label)
    rep.record("unit_iso", cs.unit_is_iso(d), label)
    pert = cs.perturb(rng, f)
    rep.record("counit_iff_cosheaf", cs.counit_is_iso(pert) == cs.cosheaf_check(pert).ok, label)
    cf = cs.cosheafify(pert)
    rep.record("cosheafify_is_cosheaf", cs.cosheaf_check(cf.cosheaf).ok, label)
    rep.record(
        "cosheafify_keeps_costalks",
        all(len(cs.costalk(cf.cosheaf, x)) == len(cs.costalk(pert, x)) for x in range(len(p))),
        label,
    )
    if small and f.max_size() <= 3 and pert.max_size() <= 3 and cf.cosheaf.max_size() <= 3:
        e = cs.cosheaf_of_functor(cs.random_functor(rng, p, 2, "contravariant"))
        if e.max_size() <= 3:
            rep.record("universal_property", cs.universal_property(pert, e), label)
            rep.record("adjunction", cs.adjunction_bijection(cs.display_space(e), pert), label)


def roundtrip_checks(rep: OracleReport, rng: random.Random, p: Poset, max_size: int) -> None:
    label = f"{p.to_json()}"
    for variance in ("covariant", "contravariant"):
        f = cs.random_functor(rng, p, max_size, variance)
        rt = cs.functor_roundtrip(f)
        rep.record(f"roundtrip_{variance}", rt.ok, label)
        if variance == "covariant":
            e = cs.etale_space(f)
            chain = _random_chain(rng, p)
            start = rng.randrange(len(f.sets[chain[0]])) if f.sets[chain[0]] else None
            if start is not None:
                rep.record("unique_chain_lift", len(cs.chain_lifts(e, f, chain, start)) == 1, label)


def _random_chain(rng: random.Random, p: Poset) -> list[int]:
    x = rng.randrange(len(p))
    chain = [x]
    while len(chain) < 6 and rng.random() < 0.7:
        above = sorted(p.up(chain[-1]))
        chain.append(rng.choice(above))
    return chain


def named_model_checks(rep: OracleReport) -> None:
    rt = cs.functor_roundtrip(cs.two_origins_functor())
    rep.record("two_origins_model", rt.ok and cs.isomorphic_over(rt.space, cs.two_origins_model()), "")
    rt = cs.functor_roundtrip(cs.crossing_lines_functor())
    rep.record("crossing_lines_model", rt.ok and cs.isomorphic_over(rt.space, cs.crossing_lines_model()), "")
    y = cs.two_origins_model()
    r = cs.classify_spread(y)
    rep.record("two_origins_not_uc", not r.uniquely_complete and not cs.unit_is_iso(y), "")


def cosheaf_suite(seed: int = 0, points_max: int = 5, per_poset: int = 2) -> OracleReport:
    rep = OracleReport("cosheaf")
    rng = random.Random(seed)
    for n in range(1, points_max + 1):
        for p in iter_posets(n):
            for _ in range(per_poset):
                cosheaf_instance_checks(rep, rng, p, 3, small=True)
                roundtrip_checks(rep, rng, p, 4)
    named_model_checks(rep)
    return rep


SUITES = {
    "braid": lambda c: braid_suite(c.seed, c.pairs),
    "spn": lambda c: spn_suite(c.seed, c.n_max, c.trials),
    "poset": lambda c: poset_suite(c.seed, min(c.n_max, 6)),
    "cosheaf": lambda c: cosheaf_suite(c.seed, c.points_max, c.per_poset),
}


def run_suite(name: str, config: OracleConfig | None = None) -> OracleReport:
    config = config or OracleConfig()
    if name == "all":
        rep = OracleReport("all")
        for key in SUITES:
            rep.merge(SUITES[key](config))
        return rep
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    return SUITES[name](config)
