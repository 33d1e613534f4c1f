"""Set-valued precosheaves on finite spaces and their display spaces.

A precosheaf is tabulated on every open of its base: ``cosections[U]`` is a
tuple of labels and ``ext(U, V)`` maps indices of ``F(U)`` to indices of
``F(V)``.  Finite spaces are Alexandrov, so each point ``x`` has a smallest
open ``U_x`` and the costalk at ``x`` is ``F(U_x)``.

The display space of ``F`` has points ``(x, b)`` with ``b`` in ``F(U_x)``;
the basic open attached to ``a`` in ``F(U)`` is

    V_a = {(x, b) : x in U, ext(U_x, U)(b) = a}

and the smallest open around ``(x, b)`` is ``V_b`` itself.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .order import FiniteSpace, OrderError, Poset, Preorder, alexandrov, is_continuous, is_homeomorphism

CHECK_LIMIT = 8
COSHEAFIFY_LIMIT = 6
ROUNDTRIP_LIMIT = 8
EXHAUSTIVE_COVER_LIMIT = 12


class CosheafError(ValueError):
    pass


def _key(u: frozenset[int]) -> tuple:
    return (len(u), sorted(u))


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> list[list]:
        out: dict = {}
        for x in sorted(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return [out[r] for r in sorted(out)]


# ---------------------------------------------------------------------------
# precosheaves


@dataclass(frozen=True, eq=False)
class Precosheaf:
    base: FiniteSpace
    cosections: dict[frozenset[int], tuple]
    extensions: dict[tuple[frozenset[int], frozenset[int]], tuple[int, ...]] = field(repr=False)

    def __post_init__(self):
        opens = self.base.opens
        if set(self.cosections) != set(opens):
            raise CosheafError("cosections must be given on every open set")
        for u in opens:
            for v in opens:
                if not u <= v:
                    continue
                m = self.extensions.get((u, v))
                if m is None:
                    raise CosheafError(f"missing extension {sorted(u)} -> {sorted(v)}")
                if len(m) != len(self.cosections[u]) or any(not 0 <= t < len(self.cosections[v]) for t in m):
                    raise CosheafError(f"extension {sorted(u)} -> {sorted(v)} is malformed")
                if u == v and list(m) != list(range(len(m))):
                    raise CosheafError(f"extension along {sorted(u)} is not the identity")
        for u, v, w in self._triples():
            uv, vw, uw = self.extensions[(u, v)], self.extensions[(v, w)], self.extensions[(u, w)]
            if any(vw[uv[a]] != uw[a] for a in range(len(uv))):
                raise CosheafError(f"extensions do not compose along {sorted(u)}, {sorted(v)}, {sorted(w)}")

    def _triples(self) -> Iterator[tuple[frozenset, frozenset, frozenset]]:
        opens = self.base.opens
        for u in opens:
            sup = [v for v in opens if u < v]
            for v in sup:
                for w in sup:
                    if v < w:
                        yield u, v, w

    @classmethod
    def from_generators(cls, base: FiniteSpace, cosections: dict, generators: dict) -> Precosheaf:
        """Build the full extension table from maps along covering inclusions
        ``U < V`` of the open lattice; every other inclusion is a composite."""
        opens = base.opens
        covers_of = {u: [v for v in opens if u < v and not any(u < w < v for w in opens)] for u in opens}
        ext: dict = {}
        for u in sorted(opens, key=_key, reverse=True):
            ext[(u, u)] = tuple(range(len(cosections[u])))
            for v in covers_of[u]:
                if (u, v) not in generators:
                    raise CosheafError(f"missing extension {sorted(u)} -> {sorted(v)}")
            for w in opens:
                if not u < w:
                    continue
                candidates = {
                    tuple(ext[(v, w)][t] for t in generators[(u, v)]) for v in covers_of[u] if v <= w
                }
                if len(candidates) != 1:
                    raise CosheafError(f"extensions {sorted(u)} -> {sorted(w)} disagree along different chains")
                ext[(u, w)] = candidates.pop()
        for (u, v), m in generators.items():
            if (u, v) in ext and tuple(m) != ext[(u, v)]:
                raise CosheafError(f"extension {sorted(u)} -> {sorted(v)} is not the composite")
        return cls(base, dict(cosections), ext)

    def ext(self, u: Iterable[int], v: Iterable[int]) -> tuple[int, ...]:
        return self.extensions[(frozenset(u), frozenset(v))]

    def __getitem__(self, u: Iterable[int]) -> tuple:
        return self.cosections[frozenset(u)]

    def size(self, u: Iterable[int]) -> int:
        return len(self.cosections[frozenset(u)])

    def max_size(self) -> int:
        return max(map(len, self.cosections.values()))

    def to_json(self) -> dict:
        opens = self.base.opens
        index = {u: i for i, u in enumerate(opens)}
        return {
            "space": self.base.to_json(),
            "cosections": {str(index[u]): [_jsonable(x) for x in self.cosections[u]] for u in opens},
            "extensions": {
                f"{index[u]}⊆{index[v]}": list(m) for (u, v), m in sorted(self.extensions.items(), key=lambda kv: (index[kv[0][0]], index[kv[0][1]])) if u != v
            },
        }

    @classmethod
    def from_json(cls, payload: dict) -> Precosheaf:
        _reject_unknown(payload, {"space", "cosections", "extensions"}, required=True)
        base = FiniteSpace.from_json(payload["space"])
        opens = base.opens
        cos = {}
        for k, labels in payload["cosections"].items():
            cos[opens[_open_index(k, len(opens))]] = tuple(_hashable(x) for x in labels)
        gens = {}
        for k, m in payload["extensions"].items():
            sep = "⊆" if "⊆" in k else "<="
            a, _, b = k.partition(sep)
            u, v = opens[_open_index(a, len(opens))], opens[_open_index(b, len(opens))]
            if not u <= v:
                raise CosheafError(f"extension key {k!r} is not an inclusion")
            gens[(u, v)] = tuple(int(t) for t in m)
        if set(cos) != set(opens):
            raise CosheafError("cosections must be given on every open set (keys are open indices)")
        return cls.from_generators(base, cos, gens)


def _open_index(text: str, count: int) -> int:
    try:
        i = int(str(text).strip())
    except ValueError:
        raise CosheafError(f"bad open index {text!r}") from None
    if not 0 <= i < count:
        raise CosheafError(f"open index {i} out of range")
    return i


def _reject_unknown(payload, allowed: set[str], required: bool = False) -> None:
    if not isinstance(payload, dict):
        raise CosheafError("expected a JSON object")
    extra = set(payload) - allowed
    if extra:
        raise CosheafError(f"unknown fields: {sorted(extra)}")
    if required and set(payload) != allowed:
        raise CosheafError(f"missing fields: {sorted(allowed - set(payload))}")


def _hashable(x):
    return tuple(_hashable(y) for y in x) if isinstance(x, list) else x


def _jsonable(x):
    if isinstance(x, (tuple, list, frozenset)):
        return [_jsonable(y) for y in (sorted(x) if isinstance(x, frozenset) else x)]
    return x


def tabulate(base: FiniteSpace, sets, ext) -> Precosheaf:
    """Precosheaf from callables ``sets(U) -> labels`` and
    ``ext(U, V) -> {label: label}``."""
    cos = {u: tuple(sets(u)) for u in base.opens}
    table = {}
    for u in base.opens:
        for v in base.opens:
            if u <= v:
                f = ext(u, v)
                index = {x: i for i, x in enumerate(cos[v])}
                table[(u, v)] = tuple(index[f[x]] for x in cos[u])
    return Precosheaf(base, cos, table)


def constant_precosheaf(base: FiniteSpace) -> Precosheaf:
    """``U -> {*}`` on non-empty opens and ``{}`` on the empty open.  A cosheaf
    exactly when every non-empty open is connected."""
    return tabulate(base, lambda u: ("*",) if u else (), lambda u, v: {"*": "*"})


# ---------------------------------------------------------------------------
# the cosheaf condition


@dataclass(frozen=True)
class CoverFailure:
    open: frozenset[int]
    cover: tuple[frozenset[int], ...]
    reason: str  # not-surjective | not-injective

    def to_json(self) -> dict:
        return {"open": sorted(self.open), "cover": [sorted(c) for c in self.cover], "reason": self.reason}


@dataclass(frozen=True)
class CosheafCheck:
    ok: bool
    failure: CoverFailure | None = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"cosheaf": self.ok, "failure": None if self.failure is None else self.failure.to_json()}


def cover_colimit(f: Precosheaf, cover: Sequence[frozenset[int]]) -> list[list[tuple[int, int]]]:
    """Classes of ``(i, a)``, ``a`` in ``F(U_i)``, glued along ``F(U_i & U_j)``."""
    uf = _UnionFind((i, a) for i, u in enumerate(cover) for a in range(f.size(u)))
    for i, j in itertools.combinations(range(len(cover)), 2):
        w = cover[i] & cover[j]
        wi, wj = f.ext(w, cover[i]), f.ext(w, cover[j])
        for c in range(f.size(w)):
            uf.union((i, wi[c]), (j, wj[c]))
    return uf.classes()


def check_cover(f: Precosheaf, u: frozenset[int], cover: Sequence[frozenset[int]]) -> CoverFailure | None:
    classes = cover_colimit(f, cover)
    images = []
    for cls in classes:
        i, a = cls[0]
        images.append(f.ext(cover[i], u)[a])
    if len(set(images)) != len(images):
        return CoverFailure(u, tuple(cover), "not-injective")
    if len(images) != f.size(u):
        return CoverFailure(u, tuple(cover), "not-surjective")
    return None


def minimal_cover(base: FiniteSpace, u: frozenset[int]) -> tuple[frozenset[int], ...]:
    return tuple(sorted({base.minimal_open(x) for x in u}, key=_key))


def cosheaf_check(f: Precosheaf, exhaustive: bool = False) -> CosheafCheck:
    """The colimit condition for every open ``U``.

    By default each ``U`` is tested against its cover by minimal opens, which
    suffices: a precosheaf satisfying it is the left Kan extension of its
    restriction to the basis, and every other cover then glues the same way.
    ``exhaustive=True`` tests every cover (small bases only).
    """
    base = f.base
    if len(base) > CHECK_LIMIT:
        raise CosheafError(f"cosheaf check limited to {CHECK_LIMIT} points")
    for u in base.opens:
        if exhaustive:
            inside = [v for v in base.opens if v <= u and v]
            if len(inside) > EXHAUSTIVE_COVER_LIMIT:
                raise CosheafError("too many opens for the exhaustive cover check")
            covers = (
                c
                for r in range(len(inside) + 1)
                for c in itertools.combinations(inside, r)
                if frozenset().union(*c) == u
            )
        else:
            covers = [minimal_cover(base, u)]
        for cover in covers:
            failure = check_cover(f, u, cover)
            if failure is not None:
                return CosheafCheck(False, failure)
    return CosheafCheck(True)


# ---------------------------------------------------------------------------
# costalks and restriction


def costalk(f: Precosheaf, x: int) -> tuple:
    return f[f.base.minimal_open(x)]


def costalk_limit(f: Precosheaf, x: int) -> list[dict[frozenset[int], int]]:
    """The limit over opens containing ``x`` as explicit consistent families."""
    nbhd = [u for u in f.base.opens if x in u]
    out = []
    for choice in itertools.product(*(range(f.size(u)) for u in nbhd)):
        fam = dict(zip(nbhd, choice))
        if all(f.ext(u, v)[fam[u]] == fam[v] for u in nbhd for v in nbhd if u <= v):
            out.append(fam)
    return out


def restrict(f: Precosheaf, subset: Iterable[int]) -> tuple[Precosheaf, tuple[int, ...]]:
    """Pull back to a subspace ``A``: ``F|_A(V) = F(smallest open containing V)``,
    the limit over opens of ``X`` containing ``V``."""
    sub, idx = f.base.subspace(subset)

    def hull(v):
        return f.base.smallest_open_containing(idx[i] for i in v)

    cos = {v: f[hull(v)] for v in sub.opens}
    ext = {(v, w): f.ext(hull(v), hull(w)) for v in sub.opens for w in sub.opens if v <= w}
    return Precosheaf(sub, cos, ext), idx


# ---------------------------------------------------------------------------
# spaces over X


@dataclass(frozen=True)
class SpaceOverX:
    total: FiniteSpace
    base: FiniteSpace
    projection: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "projection", tuple(int(t) for t in self.projection))
        if len(self.projection) != len(self.total) or any(not 0 <= t < len(self.base) for t in self.projection):
            raise CosheafError("projection must send every total point to a base point")
        if not is_continuous(self.projection, self.total, self.base):
            raise CosheafError("projection is not continuous")

    def preimage(self, u: Iterable[int]) -> frozenset[int]:
        u = set(u)
        return frozenset(y for y, x in enumerate(self.projection) if x in u)

    def fibre(self, x: int) -> list[int]:
        return [y for y, t in enumerate(self.projection) if t == x]

    def to_json(self) -> dict:
        return {"total": self.total.to_json(), "base": self.base.to_json(), "projection": list(self.projection)}

    @classmethod
    def from_json(cls, payload: dict) -> SpaceOverX:
        _reject_unknown(payload, {"total", "base", "projection"}, required=True)
        return cls(FiniteSpace.from_json(payload["total"]), FiniteSpace.from_json(payload["base"]), tuple(payload["projection"]))


def identity_over(base: FiniteSpace) -> SpaceOverX:
    return SpaceOverX(base, base, tuple(range(len(base))))


def components_cosheaf(p: SpaceOverX) -> Precosheaf:
    """``U -> pi_0(p^-1 U)``, components labelled by sorted point tuples."""
    comps = {u: [tuple(sorted(c)) for c in p.total.components(p.preimage(u))] for u in p.base.opens}

    def ext(u, v):
        return {c: next(d for d in comps[v] if c[0] in d) for c in comps[u]}

    return tabulate(p.base, lambda u: comps[u], ext)


@dataclass(frozen=True)
class Display:
    """Display space with bookkeeping: ``points[k] = (x, b)``."""

    space: SpaceOverX
    points: tuple[tuple[int, int], ...]

    def index(self, x: int, b: int) -> int:
        return self.points.index((x, b))

    def basic_open(self, f: Precosheaf, u: frozenset[int], a: int) -> frozenset[int]:
        base = f.base
        return frozenset(
            k for k, (x, b) in enumerate(self.points) if x in u and f.ext(base.minimal_open(x), u)[b] == a
        )


def display(f: Precosheaf) -> Display:
    base = f.base
    points = tuple((x, b) for x in range(len(base)) for b in range(len(costalk(f, x))))
    lookup = {pt: k for k, pt in enumerate(points)}
    mins = []
    for x, b in points:
        ux = base.minimal_open(x)
        mins.append(
            frozenset(lookup[(y, c)] for y in ux for c in range(len(costalk(f, y))) if f.ext(base.minimal_open(y), ux)[c] == b)
        )
    total = FiniteSpace(tuple(f"{base.points[x]}:{_label(costalk(f, x)[b])}" for x, b in points), tuple(mins))
    return Display(SpaceOverX(total, base, tuple(x for x, _ in points)), points)


def _label(x) -> str:
    if isinstance(x, tuple):
        return "{" + ",".join(map(_label, x)) + "}"
    return str(x)


def display_space(f: Precosheaf) -> SpaceOverX:
    return display(f).space


@dataclass(frozen=True)
class SpreadReport:
    spread: bool
    complete: bool
    uniquely_complete: bool
    locally_connected: bool
    failures: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "spread": self.spread,
            "complete": self.complete,
            "uniquely_complete": self.uniquely_complete,
            "locally_connected": self.locally_connected,
            "failures": list(self.failures),
        }


def locally_connected(space: FiniteSpace) -> bool:
    """Every point has a basis of connected neighbourhoods.  For a finite space
    the minimal open ``U_y`` is connected (``y`` is below all its points), so
    this always holds; we check it rather than assume it."""
    return all(space.is_connected(space.minimal_open(y)) for y in range(len(space)))


def is_spread_literal(p: SpaceOverX) -> bool:
    """Components of all preimages of opens form a basis (brute force)."""
    basis = {c for u in p.base.opens for c in p.total.components(p.preimage(u))}
    return all(p.total.minimal_open(y) in basis for y in range(len(p.total)))


def classify_spread(p: SpaceOverX) -> SpreadReport:
    total, base = p.total, p.base
    failures = []
    spread = True
    for y in range(len(total)):
        # the smallest candidate basic open around y lives over U_{p(y)}
        pre = p.preimage(base.minimal_open(p.projection[y]))
        comp = next(c for c in total.components(pre) if y in c)
        if comp != total.minimal_open(y):
            spread = False
            failures.append(f"not-spread at total point {y}")
    complete = unique = True
    for x in range(len(base)):
        fibre = set(p.fibre(x))
        for comp in total.components(p.preimage(base.minimal_open(x))):
            hits = len(comp & fibre)
            if hits == 0:
                complete = unique = False
                failures.append(f"not-complete over base point {x}")
            elif hits > 1:
                unique = False
                failures.append(f"not-unique over base point {x}")
    return SpreadReport(spread, complete, unique, locally_connected(total), tuple(failures))


# ---------------------------------------------------------------------------
# maps of precosheaves and of spaces over X


Nat = dict[frozenset[int], tuple[int, ...]]


def is_natural(phi: Nat, e: Precosheaf, f: Precosheaf) -> bool:
    opens = e.base.opens
    return all(
        f.ext(u, v)[phi[u][a]] == phi[v][e.ext(u, v)[a]]
        for u in opens
        for v in opens
        if u <= v
        for a in range(e.size(u))
    )


def natural_transformations(e: Precosheaf, f: Precosheaf) -> list[Nat]:
    """All maps ``E -> F`` by backtracking with forward propagation."""
    if e.base is not f.base and e.base != f.base:
        raise CosheafError("precosheaves live on different bases")
    opens = sorted(e.base.opens, key=_key)
    variables = [(u, a) for u in opens for a in range(e.size(u))]
    supsets = {u: [v for v in opens if u < v] for u in opens}
    out: list[Nat] = []

    def assign(state: dict, u, a, val) -> dict | None:
        state = dict(state)
        state[(u, a)] = val
        for v in supsets[u]:
            key, forced = (v, e.ext(u, v)[a]), f.ext(u, v)[val]
            if state.setdefault(key, forced) != forced:
                return None
        return state

    def rec(k: int, state: dict):
        if k == len(variables):
            out.append({u: tuple(state[(u, a)] for a in range(e.size(u))) for u in opens})
            return
        u, a = variables[k]
        if (u, a) in state:
            rec(k + 1, state)
            return
        for val in range(f.size(u)):
            nxt = assign(state, u, a, val)
            if nxt is not None:
                rec(k + 1, nxt)

    rec(0, {})
    return out


def maps_over(y: SpaceOverX, z: SpaceOverX) -> list[tuple[int, ...]]:
    """Continuous maps ``Y -> Z`` commuting with the projections."""
    if y.base != z.base:
        raise CosheafError("spaces lie over different bases")
    choices = [z.fibre(x) for x in y.projection]
    out = []
    n = len(y.total)

    def rec(k: int, g: list[int]):
        if k == n:
            out.append(tuple(g))
            return
        for c in choices[k]:
            g.append(c)
            # continuity at already-placed points: g(U_j) inside U_{g(j)}
            if all(
                g[t] in z.total.minimal_open(g[j]) for j in range(k + 1) for t in y.total.minimal_open(j) if t <= k
            ):
                rec(k + 1, g)
            g.pop()

    rec(0, [])
    return out


@dataclass(frozen=True)
class Cosheafification:
    cosheaf: Precosheaf
    counit: Nat  # cosheaf -> original
    display: Display


def cosheafify(f: Precosheaf) -> Cosheafification:
    """``C(D(F))`` with its canonical map to ``F``: a component inside
    ``p^-1 U`` lies in a single ``V_a`` and goes to ``a``."""
    if len(f.base) > COSHEAFIFY_LIMIT:
        raise CosheafError(f"cosheafification limited to {COSHEAFIFY_LIMIT} points")
    disp = display(f)
    c = components_cosheaf(disp.space)
    base = f.base
    counit = {}
    for u in base.opens:
        row = []
        for comp in c[u]:
            x, b = disp.points[comp[0]]
            row.append(f.ext(base.minimal_open(x), u)[b])
        counit[u] = tuple(row)
    return Cosheafification(c, counit, disp)


def is_iso(phi: Nat, e: Precosheaf, f: Precosheaf) -> bool:
    return all(sorted(phi[u]) == list(range(f.size(u))) and e.size(u) == f.size(u) for u in e.base.opens)


def compose_nat(phi: Nat, psi: Nat) -> Nat:
    """``psi . phi`` (apply ``phi`` first)."""
    return {u: tuple(psi[u][t] for t in phi[u]) for u in phi}


def _nat_key(phi: Nat) -> tuple:
    return tuple(phi[u] for u in sorted(phi, key=_key))


def universal_property(f: Precosheaf, e: Precosheaf) -> bool:
    """For the cosheaf ``E``: post-composition with the counit is a bijection
    ``Nat(E, C(D(F))) -> Nat(E, F)``."""
    cf = cosheafify(f)
    into_f = {_nat_key(phi) for phi in natural_transformations(e, f)}
    through = [_nat_key(compose_nat(phi, cf.counit)) for phi in natural_transformations(e, cf.cosheaf)]
    return len(set(through)) == len(through) and set(through) == into_f


def adjunction_bijection(y: SpaceOverX, f: Precosheaf) -> bool:
    """``Nat(C(Y), F)`` and continuous maps ``Y -> D(F)`` over ``X`` correspond:
    a map ``g`` sends the component ``k`` of ``q^-1 U`` to the ``a`` with
    ``g(k)`` inside ``V_a``."""
    cy = components_cosheaf(y)
    disp = display(f)
    nats = {_nat_key(phi) for phi in natural_transformations(cy, f)}
    base = f.base
    seen = set()
    for g in maps_over(y, disp.space):
        phi = {}
        for u in base.opens:
            row = []
            for comp in cy[u]:
                vals = set()
                for t in comp:
                    x, b = disp.points[g[t]]
                    vals.add(f.ext(base.minimal_open(x), u)[b])
                if len(vals) != 1:
                    return False
                row.append(vals.pop())
            phi[u] = tuple(row)
        key = _nat_key(phi)
        if key in seen or key not in nats:
            return False
        seen.add(key)
    return seen == nats


def unit_map(y: SpaceOverX) -> tuple[tuple[int, ...], Display]:
    """``Y -> D(C(Y))``: ``y`` goes to its component in ``q^-1 U_{q(y)}``."""
    cy = components_cosheaf(y)
    disp = display(cy)
    g = []
    for t in range(len(y.total)):
        x = y.projection[t]
        comps = cy[y.base.minimal_open(x)]
        b = next(i for i, c in enumerate(comps) if t in c)
        g.append(disp.index(x, b))
    return tuple(g), disp


def unit_is_iso(y: SpaceOverX) -> bool:
    g, disp = unit_map(y)
    return is_homeomorphism(g, y.total, disp.space.total)


def counit_is_iso(f: Precosheaf) -> bool:
    cf = cosheafify(f)
    return is_iso(cf.counit, cf.cosheaf, f)


# ---------------------------------------------------------------------------
# functors on posets


@dataclass(frozen=True, eq=False)
class PosetFunctor:
    """Set-valued functor on a poset.  ``maps[(x, y)]`` for ``x <= y`` goes
    ``F(x) -> F(y)`` when covariant and ``F(y) -> F(x)`` when contravariant."""

    poset: Poset
    sets: tuple[tuple, ...]
    maps: dict[tuple[int, int], tuple[int, ...]]
    variance: str = "covariant"

    def __post_init__(self):
        if self.variance not in ("covariant", "contravariant"):
            raise CosheafError(f"unknown variance {self.variance!r}")
        p = self.poset
        n = len(p)
        if len(self.sets) != n:
            raise CosheafError("one set per poset element")
        for x in range(n):
            for y in range(n):
                if not p.leq[x][y]:
                    continue
                m = self.maps.get((x, y))
                if m is None:
                    raise CosheafError(f"missing map for {x} <= {y}")
                src, dst = self._ends(x, y)
                if len(m) != len(self.sets[src]) or any(not 0 <= t < len(self.sets[dst]) for t in m):
                    raise CosheafError(f"map for {x} <= {y} is malformed")
                if x == y and list(m) != list(range(len(m))):
                    raise CosheafError(f"map for {x} <= {x} is not the identity")
        for x, y, z in itertools.product(range(n), repeat=3):
            if p.leq[x][y] and p.leq[y][z]:
                if self.apply_chain([x, y, z]) != self.maps[(x, z)]:
                    raise CosheafError(f"maps do not compose along {x} <= {y} <= {z}")

    def _ends(self, x: int, y: int) -> tuple[int, int]:
        return (x, y) if self.variance == "covariant" else (y, x)

    @property
    def covariant(self) -> bool:
        return self.variance == "covariant"

    def apply_chain(self, chain: Sequence[int]) -> tuple[int, ...]:
        """Composite along ``x_0 <= x_1 <= ...`` as a map on the start set."""
        steps = [self.maps[(a, b)] for a, b in zip(chain, chain[1:])]
        if not self.covariant:
            steps = steps[::-1]
        start = chain[0] if self.covariant else chain[-1]
        out = list(range(len(self.sets[start])))
        for m in steps:
            out = [m[t] for t in out]
        return tuple(out)

    @classmethod
    def from_generators(cls, poset: Poset, sets, covers: dict, variance: str = "covariant") -> PosetFunctor:
        """Extend maps given on covering relations to all relations."""
        n = len(poset)
        maps: dict = {(x, x): tuple(range(len(sets[x]))) for x in range(n)}
        hasse = poset.covers()
        for x, y in hasse:
            if (x, y) not in covers:
                raise CosheafError(f"missing map for cover {x} < {y}")
        # covers above x are handled before x
        for x in sorted(range(n), key=lambda x: len(poset.up(x))):
            for y in poset.up(x):
                if y == x:
                    continue
                cands = set()
                for a, b in hasse:
                    if a == x and poset.leq[b][y]:
                        first = tuple(covers[(a, b)])
                        rest = maps[(b, y)]
                        if variance == "covariant":
                            cands.add(tuple(rest[t] for t in first))
                        else:
                            cands.add(tuple(first[t] for t in rest))
                if len(cands) != 1:
                    raise CosheafError(f"maps disagree along different chains {x} <= {y}")
                maps[(x, y)] = cands.pop()
        return cls(poset, tuple(tuple(s) for s in sets), maps, variance)

    def to_json(self) -> dict:
        return {
            "poset": self.poset.to_json(),
            "sets": {str(x): [_jsonable(v) for v in s] for x, s in enumerate(self.sets)},
            "maps": {f"{x}<={y}": list(m) for (x, y), m in sorted(self.maps.items()) if x != y},
            "variance": self.variance,
        }

    @classmethod
    def from_json(cls, payload: dict) -> PosetFunctor:
        _reject_unknown(payload, {"poset", "sets", "maps", "variance"})
        for key in ("poset", "sets", "maps"):
            if key not in payload:
                raise CosheafError(f"missing field {key!r}")
        pre = Preorder.from_json(payload["poset"])
        try:
            poset = Poset(pre.elements, pre.leq)
        except OrderError as exc:
            raise CosheafError(str(exc)) from None
        n = len(poset)
        sets = [None] * n
        for k, labels in payload["sets"].items():
            sets[_open_index(k, n)] = tuple(_hashable(v) for v in labels)
        if any(s is None for s in sets):
            raise CosheafError("every poset element needs a set")
        maps = {}
        for k, m in payload["maps"].items():
            a, sep, b = k.partition("<=")
            if not sep:
                raise CosheafError(f"map key {k!r} must look like 'x<=y'")
            maps[(_open_index(a, n), _open_index(b, n))] = tuple(int(t) for t in m)
        variance = payload.get("variance", "covariant")
        if variance not in ("covariant", "contravariant"):
            raise CosheafError(f"unknown variance {variance!r}")
        return cls.from_generators(poset, sets, maps, variance)


def constant_functor(poset: Poset, k: int = 1, variance: str = "covariant") -> PosetFunctor:
    n = len(poset)
    maps = {(x, y): tuple(range(k)) for x in range(n) for y in range(n) if poset.leq[x][y]}
    return PosetFunctor(poset, tuple(tuple(range(k)) for _ in range(n)), maps, variance)


def natural_iso_check(f: PosetFunctor, g: PosetFunctor, phi: Sequence[Sequence[int]]) -> bool:
    """``phi[x]`` is a bijection ``F(x) -> G(x)`` natural in ``x``."""
    if f.variance != g.variance or len(f.poset) != len(g.poset):
        return False
    n = len(f.poset)
    for x in range(n):
        if sorted(phi[x]) != list(range(len(g.sets[x]))) or len(phi[x]) != len(f.sets[x]):
            return False
    for (x, y), m in f.maps.items():
        src, dst = f._ends(x, y)
        gm = g.maps[(x, y)]
        if any(phi[dst][m[a]] != gm[phi[src][a]] for a in range(len(f.sets[src]))):
            return False
    return True


# covariant side: the etale space ------------------------------------------


@dataclass(frozen=True)
class Etale:
    space: SpaceOverX
    points: tuple[tuple[int, int], ...]


def etale_space(f: PosetFunctor) -> Etale:
    """Points ``(x, a)``; ``(x, a) <= (y, b)`` iff ``x <= y`` and ``F(x <= y)(a) = b``.
    With the Alexandrov topology this is the space over ``alexandrov(P)``
    whose sections over ``U_x`` are the germs ``a`` in ``F(x)``."""
    if not f.covariant:
        raise CosheafError("the etale construction needs a covariant functor")
    p = f.poset
    points = tuple((x, a) for x in range(len(p)) for a in range(len(f.sets[x])))
    lookup = {pt: k for k, pt in enumerate(points)}
    mins = tuple(frozenset(lookup[(y, f.maps[(x, y)][a])] for y in p.up(x)) for x, a in points)
    total = FiniteSpace(tuple(f"{p.elements[x]}:{_label(f.sets[x][a])}" for x, a in points), mins)
    return Etale(SpaceOverX(total, alexandrov(p), tuple(x for x, _ in points)), points)


def is_local_homeomorphism(p: SpaceOverX) -> bool:
    """``p`` maps each minimal open ``U_y`` homeomorphically onto ``U_{p(y)}``."""
    for y in range(len(p.total)):
        uy = sorted(p.total.minimal_open(y))
        ux = p.base.minimal_open(p.projection[y])
        image = [p.projection[t] for t in uy]
        if sorted(image) != sorted(ux):
            return False
        src, _ = p.total.subspace(uy)
        dst, didx = p.base.subspace(ux)
        pos = {x: i for i, x in enumerate(didx)}
        if not is_homeomorphism([pos[x] for x in image], src, dst):
            return False
    return True


def functor_of_etale(e: SpaceOverX, poset: Poset) -> tuple[PosetFunctor, list[list[int]]]:
    """Monodromy: ``(x, a)`` goes to the unique point over ``y`` in ``U_(x,a)``.

    Returns the functor on fibre indices and the fibre lists.
    """
    n = len(poset)
    fibres = [e.fibre(x) for x in range(n)]
    pos = [{t: i for i, t in enumerate(fb)} for fb in fibres]
    maps = {}
    for x in range(n):
        for y in poset.up(x):
            row = []
            for t in fibres[x]:
                over = [s for s in e.total.minimal_open(t) if e.projection[s] == y]
                if len(over) != 1:
                    raise CosheafError(f"no unique lift of {x} <= {y}")
                row.append(pos[y][over[0]])
            maps[(x, y)] = tuple(row)
    sets = tuple(tuple(range(len(fb))) for fb in fibres)
    return PosetFunctor(poset, sets, maps, "covariant"), fibres


def chain_lifts(e: Etale, f: PosetFunctor, chain: Sequence[int], start: int) -> list[tuple[int, ...]]:
    """All lifts of ``x_0 <= ... <= x_k`` through the etale space starting at
    the germ ``start`` over ``x_0``, found by search over the fibres."""
    fibres = [e.space.fibre(x) for x in chain]
    total = e.space.total
    out = []

    def rec(path):
        if len(path) == len(chain):
            out.append(tuple(path))
            return
        for t in fibres[len(path)]:
            if t in total.minimal_open(path[-1]):
                rec(path + [t])

    rec([e.points.index((chain[0], start))])
    return out


# contravariant side: the cosheaf and its display ------------------------


def cosheaf_of_functor(g: PosetFunctor) -> Precosheaf:
    """``U -> colim_{x in U} G(x)``: the disjoint union glued along ``G(x <= y)``."""
    if g.covariant:
        raise CosheafError("the cosheaf construction needs a contravariant functor")
    p = g.poset
    base = alexandrov(p)
    cos, cls_of = {}, {}
    for u in base.opens:
        uf = _UnionFind((x, a) for x in u for a in range(len(g.sets[x])))
        for x in u:
            for y in u:
                if x != y and p.leq[x][y]:
                    m = g.maps[(x, y)]
                    for b in range(len(g.sets[y])):
                        uf.union((y, b), (x, m[b]))
        classes = uf.classes()
        cos[u] = tuple(tuple(c) for c in classes)
        cls_of[u] = {pt: i for i, c in enumerate(classes) for pt in c}
    ext = {
        (u, v): tuple(cls_of[v][c[0]] for c in cos[u]) for u in base.opens for v in base.opens if u <= v
    }
    return Precosheaf(base, cos, ext)


def functor_of_spread(d: SpaceOverX, poset: Poset) -> tuple[PosetFunctor, list[list[int]]]:
    """``G(x)`` is the fibre over ``x``; ``G(x <= y)`` sends a point over ``y``
    to the unique point ``z`` over ``x`` whose minimal open contains it."""
    n = len(poset)
    fibres = [d.fibre(x) for x in range(n)]
    pos = [{t: i for i, t in enumerate(fb)} for fb in fibres]
    maps = {}
    for x in range(n):
        for y in poset.up(x):
            row = []
            for t in fibres[y]:
                below = [z for z in fibres[x] if t in d.total.minimal_open(z)]
                if len(below) != 1:
                    raise CosheafError(f"no unique point over {x} below a point over {y}")
                row.append(pos[x][below[0]])
            maps[(x, y)] = tuple(row)
    sets = tuple(tuple(range(len(fb))) for fb in fibres)
    return PosetFunctor(poset, sets, maps, "contravariant"), fibres


@dataclass(frozen=True)
class RoundTrip:
    variance: str
    space: SpaceOverX
    recovered: PosetFunctor
    iso: tuple[tuple[int, ...], ...]
    natural: bool
    checks: dict

    @property
    def ok(self) -> bool:
        return self.natural and all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "variance": self.variance,
            "ok": self.ok,
            "natural_iso": self.natural,
            "checks": dict(self.checks),
            "space": self.space.to_json(),
            "recovered": self.recovered.to_json(),
            "iso": [list(r) for r in self.iso],
        }


def functor_roundtrip(f: PosetFunctor) -> RoundTrip:
    p = f.poset
    if len(p) > ROUNDTRIP_LIMIT:
        raise CosheafError(f"round trip limited to posets with {ROUNDTRIP_LIMIT} elements")
    if f.covariant:
        e = etale_space(f)
        back, fibres = functor_of_etale(e.space, p)
        iso = tuple(tuple(fibres[x].index(e.points.index((x, a))) for a in range(len(f.sets[x]))) for x in range(len(p)))
        checks = {"local_homeomorphism": is_local_homeomorphism(e.space)}
        return RoundTrip("covariant", e.space, back, iso, natural_iso_check(f, back, iso), checks)
    c = cosheaf_of_functor(f)
    disp = display(c)
    back, fibres = functor_of_spread(disp.space, p)
    iso = []
    for x in range(len(p)):
        ux = c.base.minimal_open(x)
        classes = c[ux]
        row = []
        for a in range(len(f.sets[x])):
            b = next(i for i, cl in enumerate(classes) if (x, a) in cl)
            row.append(fibres[x].index(disp.index(x, b)))
        iso.append(tuple(row))
    report = classify_spread(disp.space)
    checks = {
        "cosheaf": cosheaf_check(c).ok if len(p) <= CHECK_LIMIT else True,
        "spread": report.spread,
        "uniquely_complete": report.uniquely_complete,
    }
    return RoundTrip("contravariant", disp.space, back, tuple(iso), natural_iso_check(f, back, tuple(iso)), checks)


# ---------------------------------------------------------------------------
# named finite models


def line3() -> Poset:
    """The 3-point line: the origin ``0`` below the two half-lines."""
    return Poset.from_pairs(("-", "0", "+"), [("0", "-"), ("0", "+")])


def two_origins_functor() -> PosetFunctor:
    p = line3()
    maps = {(1, 0): (0, 0), (1, 2): (0, 0)}
    return PosetFunctor.from_generators(p, (("*",), ("a", "b"), ("*",)), maps, "covariant")


def crossing_lines_functor() -> PosetFunctor:
    p = line3()
    maps = {(1, 0): (0, 0), (1, 2): (0, 0)}
    return PosetFunctor.from_generators(p, (("1", "2"), ("*",), ("1", "2")), maps, "contravariant")


def two_origins_model() -> SpaceOverX:
    """Hand-built: ``-, 0a, 0b, +`` with ``U_0a = {-, 0a, +}``, ``U_0b = {-, 0b, +}``."""
    total = FiniteSpace(
        ("-", "0a", "0b", "+"),
        (frozenset({0}), frozenset({0, 1, 3}), frozenset({0, 2, 3}), frozenset({3})),
    )
    return SpaceOverX(total, alexandrov(line3()), (0, 1, 1, 2))


def crossing_lines_model() -> SpaceOverX:
    """Hand-built: two points over each half-line, one crossing point over ``0``."""
    total = FiniteSpace(
        ("-1", "-2", "0", "+1", "+2"),
        (frozenset({0}), frozenset({1}), frozenset({0, 1, 2, 3, 4}), frozenset({3}), frozenset({4})),
    )
    return SpaceOverX(total, alexandrov(line3()), (0, 0, 1, 2, 2))


def isomorphic_over(a: SpaceOverX, b: SpaceOverX) -> bool:
    """Brute force: a homeomorphism of total spaces commuting with projections."""
    if a.base != b.base or len(a.total) != len(b.total):
        return False
    for g in maps_over(a, b):
        if len(set(g)) == len(g) and is_homeomorphism(g, a.total, b.total):
            return True
    return False


# ---------------------------------------------------------------------------
# random instances


def random_functor(
    rng: random.Random, poset: Poset, max_size: int = 4, variance: str = "covariant", new_rate: float = 0.5
) -> PosetFunctor:
    """``F(x) = E_x / ~_x`` with ``E_x`` growing and ``~_x`` coarsening along the
    order (reversed for contravariant), so the quotient maps are functorial;
    each set is then relabelled by a random bijection."""
    n = len(poset)
    up = (lambda x, y: poset.leq[x][y]) if variance == "covariant" else (lambda x, y: poset.leq[y][x])
    order = sorted(range(n), key=lambda x: sum(up(z, x) for z in range(n)))
    elems: list[list[int]] = [[] for _ in range(n)]
    cls: list[dict[int, int]] = [{} for _ in range(n)]
    fresh = itertools.count()
    for x in order:
        preds = [z for z in range(n) if z != x and up(z, x)]
        items = sorted({t for z in preds for t in elems[z]})
        uf = _UnionFind(items)
        for z in preds:
            groups: dict[int, list[int]] = {}
            for t in elems[z]:
                groups.setdefault(cls[z][t], []).append(t)
            for g in groups.values():
                for t in g[1:]:
                    uf.union(g[0], t)
        classes = uf.classes()
        while len(classes) < max_size and (not classes or rng.random() < new_rate):
            t = next(fresh)
            uf.parent[t] = t
            classes.append([t])
        while len(classes) > 1 and rng.random() < 0.2:
            a, b = rng.sample(range(len(classes)), 2)
            uf.union(classes[a][0], classes[b][0])
            classes = uf.classes()
        while len(classes) > max_size:
            uf.union(classes[0][0], classes[1][0])
            classes = uf.classes()
        elems[x] = [t for c in classes for t in c]
        cls[x] = {t: i for i, c in enumerate(classes) for t in c}
    relabel = []
    for x in range(n):
        k = len(set(cls[x].values()))
        perm = list(range(k))
        rng.shuffle(perm)
        relabel.append(perm)
    sets = tuple(tuple(range(len(set(cls[x].values())))) for x in range(n))
    maps = {}
    for x in range(n):
        for y in range(n):
            if not poset.leq[x][y]:
                continue
            src, dst = (x, y) if variance == "covariant" else (y, x)
            row = [0] * len(sets[src])
            for t in elems[src]:
                row[relabel[src][cls[src][t]]] = relabel[dst][cls[dst][t]]
            maps[(x, y)] = tuple(row)
    return PosetFunctor(poset, sets, maps, variance)


def perturb(rng: random.Random, f: Precosheaf, extras: int = 1, merges: int = 1) -> Precosheaf:
    """A random precosheaf near ``f``: add anchored extra cosections (breaking
    surjectivity of gluing) and merge cosections upward-closed (breaking
    injectivity)."""
    base = f.base
    opens = [u for u in base.opens if u]
    cos = {u: list(f[u]) for u in base.opens}
    ext = {k: list(v) for k, v in f.extensions.items()}
    for _ in range(extras):
        u = rng.choice(opens)
        if not cos[u]:
            continue
        anchor = rng.randrange(len(cos[u]))
        cos[u].append(("extra", len(cos[u])))
        new = len(cos[u]) - 1
        ext[(u, u)].append(new)
        for v in base.opens:
            if u < v:
                ext[(u, v)].append(ext[(u, v)][anchor])
    for _ in range(merges):
        u = rng.choice(opens)
        if len(cos[u]) < 2:
            continue
        a, b = rng.sample(range(len(cos[u])), 2)
        pairs = [(v, cos[v][ext[(u, v)][a]], cos[v][ext[(u, v)][b]]) for v in base.opens if u <= v]
        for v, la, lb in pairs:
            if la != lb:
                _merge_in(cos, ext, base, v, cos[v].index(la), cos[v].index(lb))
    return Precosheaf(base, {u: tuple(c) for u, c in cos.items()}, {k: tuple(v) for k, v in ext.items()})


def _merge_in(cos, ext, base, v, ia, ib) -> None:
    """Identify cosections ``ia`` and ``ib`` of ``F(v)``, keeping the lower index."""
    keep, drop = min(ia, ib), max(ia, ib)

    def fix(t):
        return keep if t == drop else (t - 1 if t > drop else t)

    cos[v].pop(drop)
    for (s, w), m in ext.items():
        if w == v:
            ext[(s, w)] = [fix(t) for t in m]
    for w in base.opens:
        if v < w:
            m = ext[(v, w)]
            m.pop(drop)
    ext[(v, v)] = list(range(len(cos[v])))
