"""Finite pre-orders and their specialisation/Alexandrov adjunction with finite spaces.

Points are referred to by index; ``elements``/``points`` only carry labels.
Every finite space is Alexandrov, so a :class:`FiniteSpace` is determined by
the minimal open neighbourhood ``U_x`` of each point.  The full open family
is available as :attr:`FiniteSpace.opens` (computed on first access).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Sequence


class OrderError(ValueError):
    pass


Subset = frozenset  # of point indices


def _canonical_key(s: frozenset[int]) -> tuple:
    return (len(s), tuple(sorted(s)))


# ---------------------------------------------------------------------------
# pre-orders


@dataclass(frozen=True)
class Preorder:
    """A reflexive, transitive relation stored as a dense boolean matrix.

    The constructor closes ``leq`` reflexively and transitively.
    """

    elements: tuple
    leq: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        n = len(self.elements)
        m = [list(map(bool, row)) for row in self.leq]
        if len(m) != n or any(len(row) != n for row in m):
            raise OrderError("relation matrix must be square and match the elements")
        for i in range(n):
            m[i][i] = True
        for k in range(n):
            mk = m[k]
            for i in range(n):
                if m[i][k]:
                    mi = m[i]
                    for j in range(n):
                        if mk[j]:
                            mi[j] = True
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "leq", tuple(tuple(row) for row in m))

    @classmethod
    def from_pairs(cls, elements: Sequence, pairs: Iterable[tuple]) -> Preorder:
        """Build from pairs ``(x, y)`` of element labels meaning ``x <= y``."""
        index = {e: i for i, e in enumerate(elements)}
        m = [[False] * len(elements) for _ in elements]
        for x, y in pairs:
            m[index[x]][index[y]] = True
        return cls(tuple(elements), tuple(map(tuple, m)))

    @classmethod
    def from_index_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], elements=None) -> Preorder:
        m = [[False] * n for _ in range(n)]
        for x, y in pairs:
            m[x][y] = True
        return cls(tuple(elements) if elements is not None else tuple(range(n)), tuple(map(tuple, m)))

    @classmethod
    def chain(cls, n: int) -> Preorder:
        return cls.from_index_pairs(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def discrete(cls, n: int) -> Preorder:
        return cls.from_index_pairs(n, [])

    def __len__(self):
        return len(self.elements)

    def le(self, x: int, y: int) -> bool:
        return self.leq[x][y]

    def lt(self, x: int, y: int) -> bool:
        return self.leq[x][y] and not self.leq[y][x]

    def up(self, x: int) -> frozenset[int]:
        return frozenset(j for j in range(len(self)) if self.leq[x][j])

    def down(self, x: int) -> frozenset[int]:
        return frozenset(j for j in range(len(self)) if self.leq[j][x])

    def is_antisymmetric(self) -> bool:
        n = len(self)
        return all(not (self.leq[i][j] and self.leq[j][i]) for i in range(n) for j in range(n) if i != j)

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs ``x < y`` with nothing strictly between (posets)."""
        n = len(self)
        out = []
        for x in range(n):
            for y in range(n):
                if self.lt(x, y) and not any(self.lt(x, z) and self.lt(z, y) for z in range(n)):
                    out.append((x, y))
        return out

    def restrict(self, subset: Sequence[int]) -> Preorder:
        subset = list(subset)
        return Preorder(
            tuple(self.elements[i] for i in subset),
            tuple(tuple(self.leq[i][j] for j in subset) for i in subset),
        )

    def relabel(self, perm: Sequence[int]) -> Preorder:
        """Move element ``i`` to index ``perm[i]``."""
        n = len(self)
        m = [[False] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                m[perm[i]][perm[j]] = self.leq[i][j]
        return type(self)(tuple(range(n)), tuple(map(tuple, m)))

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "leq": [list(row) for row in self.leq]}

    @classmethod
    def from_json(cls, payload: dict) -> Preorder:
        _reject_unknown(payload, {"elements", "leq"})
        return cls(tuple(payload["elements"]), tuple(tuple(bool(v) for v in row) for row in payload["leq"]))


class Poset(Preorder):
    def __post_init__(self):
        super().__post_init__()
        if not self.is_antisymmetric():
            raise OrderError("relation is not antisymmetric")

    @classmethod
    def pseudocircle(cls) -> Poset:
        """``a, b`` minimal and ``c, d`` maximal with ``a, b <= c, d``."""
        return cls.from_pairs("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def _reject_unknown(payload: dict, allowed: set[str]) -> None:
    extra = set(payload) - allowed
    if extra:
        raise OrderError(f"unknown fields: {sorted(extra)}")
    missing = allowed - set(payload)
    if missing:
        raise OrderError(f"missing fields: {sorted(missing)}")


# ---------------------------------------------------------------------------
# finite spaces


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple
    minimal_opens: tuple[frozenset[int], ...] = field(repr=False)

    def __post_init__(self):
        n = len(self.points)
        mins = tuple(frozenset(u) for u in self.minimal_opens)
        if len(mins) != n:
            raise OrderError("need one minimal open per point")
        for x, u in enumerate(mins):
            if x not in u or not u <= set(range(n)):
                raise OrderError(f"minimal open of point {x} is malformed")
            if any(not mins[y] <= u for y in u):
                raise OrderError("minimal opens are not nested consistently")
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "minimal_opens", mins)

    @classmethod
    def from_opens(cls, points: Sequence, opens: Iterable[Iterable[int]]) -> FiniteSpace:
        n = len(points)
        fam = {frozenset(u) for u in opens}
        full = frozenset(range(n))
        if frozenset() not in fam or full not in fam:
            raise OrderError("open family must contain the empty set and the whole space")
        for u in fam:
            if not u <= full:
                raise OrderError(f"open set {sorted(u)} has points outside the space")
        for u, v in itertools.combinations(fam, 2):
            if u | v not in fam or u & v not in fam:
                raise OrderError("open family is not closed under union and intersection")
        mins = []
        for x in range(n):
            m = full
            for u in fam:
                if x in u:
                    m = m & u
            mins.append(m)
        space = cls(tuple(points), tuple(mins))
        space.__dict__["opens"] = tuple(sorted(fam, key=_canonical_key))
        return space

    @classmethod
    def discrete(cls, n: int) -> FiniteSpace:
        return cls(tuple(range(n)), tuple(frozenset([x]) for x in range(n)))

    def __len__(self):
        return len(self.points)

    @property
    def full(self) -> frozenset[int]:
        return frozenset(range(len(self)))

    def minimal_open(self, x: int) -> frozenset[int]:
        return self.minimal_opens[x]

    @cached_property
    def opens(self) -> tuple[frozenset[int], ...]:
        """All open sets: the up-closed subsets, in canonical order."""
        found = {frozenset()}
        frontier = [frozenset()]
        while frontier:
            nxt = []
            for u in frontier:
                for x in range(len(self)):
                    if x not in u:
                        v = u | self.minimal_opens[x]
                        if v not in found:
                            found.add(v)
                            nxt.append(v)
            frontier = nxt
        return tuple(sorted(found, key=_canonical_key))

    def is_open(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        return all(self.minimal_opens[x] <= s for x in s)

    def is_closed(self, subset: Iterable[int]) -> bool:
        return self.is_open(self.full - frozenset(subset))

    def smallest_open_containing(self, subset: Iterable[int]) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for x in subset:
            out |= self.minimal_opens[x]
        return out

    def subspace(self, subset: Iterable[int]) -> tuple[FiniteSpace, tuple[int, ...]]:
        """Subspace topology; returns the space and the list of ambient indices."""
        idx = tuple(sorted(set(subset)))
        pos = {x: i for i, x in enumerate(idx)}
        mins = tuple(frozenset(pos[y] for y in self.minimal_opens[x] if y in pos) for x in idx)
        return FiniteSpace(tuple(self.points[x] for x in idx), mins), idx

    def components(self, subset: Iterable[int] | None = None) -> list[frozenset[int]]:
        """Connected components of a subspace (points given as ambient indices).

        Points are merged along their minimal open neighbourhoods inside the
        subspace until the partition stabilises.
        """
        subset = self.full if subset is None else frozenset(subset)
        parent = {x: x for x in subset}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in subset:
            for y in self.minimal_opens[x] & subset:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
        groups: dict[int, set[int]] = {}
        for x in subset:
            groups.setdefault(find(x), set()).add(x)
        return sorted((frozenset(g) for g in groups.values()), key=lambda g: min(g))

    def is_connected(self, subset: Iterable[int] | None = None) -> bool:
        return len(self.components(subset)) == 1

    def to_json(self) -> dict:
        return {"points": list(self.points), "opens": [sorted(u) for u in self.opens]}

    @classmethod
    def from_json(cls, payload: dict) -> FiniteSpace:
        _reject_unknown(payload, {"points", "opens"})
        return cls.from_opens(tuple(payload["points"]), [frozenset(u) for u in payload["opens"]])


def specialisation(space: FiniteSpace) -> Preorder:
    """``x <= y`` iff every open set containing ``x`` contains ``y``."""
    n = len(space)
    return Preorder(
        space.points,
        tuple(tuple(y in space.minimal_opens[x] for y in range(n)) for x in range(n)),
    )


def alexandrov(order: Preorder) -> FiniteSpace:
    """Up-closed sets are open; the up-sets ``U_p`` are the basis."""
    return FiniteSpace(order.elements, tuple(order.up(x) for x in range(len(order))))


def downward_space(order: Preorder) -> FiniteSpace:
    """The coarsest topology with specialisation order ``order``.

    Closed sets are generated by the down-sets ``D_p`` under finite unions
    and intersections (arbitrary intersections are finite here).
    """
    n = len(order)
    full = frozenset(range(n))
    closed = {frozenset(), full} | {order.down(p) for p in range(n)}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(closed), 2):
            for c in (a | b, a & b):
                if c not in closed:
                    closed.add(c)
                    changed = True
    return FiniteSpace.from_opens(order.elements, [full - c for c in closed])


def poset_quotient(order: Preorder) -> tuple[Poset, tuple[int, ...]]:
    """Identify ``x ~ y`` when ``x <= y <= x``.

    Returns the poset of classes (labelled by tuples of element labels, in
    order of first occurrence) and the quotient map as a tuple of class
    indices.
    """
    n = len(order)
    cls_of = [-1] * n
    reps: list[int] = []
    for x in range(n):
        if cls_of[x] >= 0:
            continue
        cls_of[x] = len(reps)
        for y in range(x + 1, n):
            if order.leq[x][y] and order.leq[y][x]:
                cls_of[y] = len(reps)
        reps.append(x)
    labels = tuple(tuple(order.elements[y] for y in range(n) if cls_of[y] == c) for c in range(len(reps)))
    if all(len(lbl) == 1 for lbl in labels):
        labels = tuple(lbl[0] for lbl in labels)
    m = tuple(tuple(order.leq[a][b] for b in reps) for a in reps)
    return Poset(labels, m), tuple(cls_of)


# ---------------------------------------------------------------------------
# maps


def is_monotone(f: Sequence[int], source: Preorder, target: Preorder) -> bool:
    n = len(source)
    return all(target.leq[f[x]][f[y]] for x in range(n) for y in range(n) if source.leq[x][y])


def is_continuous(f: Sequence[int], source: FiniteSpace, target: FiniteSpace) -> bool:
    """Preimages of opens are open; for finite spaces it suffices that
    ``f(U_x)`` lies in ``U_{f(x)}``."""
    return all(
        all(f[y] in target.minimal_opens[f[x]] for y in source.minimal_opens[x]) for x in range(len(source))
    )


def is_homeomorphism(f: Sequence[int], source: FiniteSpace, target: FiniteSpace) -> bool:
    if len(source) != len(target) or sorted(f) != list(range(len(target))):
        return False
    inv = [0] * len(f)
    for x, y in enumerate(f):
        inv[y] = x
    return is_continuous(f, source, target) and is_continuous(inv, target, source)


# ---------------------------------------------------------------------------
# po-spaces


@dataclass(frozen=True)
class PoSpace:
    space: FiniteSpace
    order: Preorder

    def __post_init__(self):
        if len(self.space) != len(self.order):
            raise OrderError("order and space must live on the same points")

    @classmethod
    def alexandrov(cls, order: Preorder) -> PoSpace:
        return cls(alexandrov(order), order)


class Compat(str, Enum):
    NONE = "none"
    C1 = "C1-filtered"
    C2 = "C2-well-filtered"


@dataclass(frozen=True)
class Compatibility:
    kind: Compat
    strata: tuple[frozenset[int], ...] | None = None
    strata_poset: Poset | None = None


def compatibility(ps: PoSpace) -> Compatibility:
    n = len(ps.space)
    c2 = all(ps.space.is_open(ps.order.up(x)) for x in range(n))
    c1 = all(ps.space.is_closed(ps.order.down(x)) for x in range(n))
    if c2:
        kind = Compat.C2
    elif c1:
        kind = Compat.C1
    else:
        return Compatibility(Compat.NONE)
    poset, q = poset_quotient(ps.order)
    strata = tuple(frozenset(x for x in range(n) if q[x] == c) for c in range(len(poset)))
    return Compatibility(kind, strata, poset)


@dataclass(frozen=True)
class StratifiedCheck:
    g: tuple[int, ...] | None
    failure: str | None = None  # not-continuous | splits-stratum | g-not-increasing


def stratified_map_check(f: Sequence[int], x: PoSpace, y: PoSpace) -> StratifiedCheck:
    """Check that ``f`` is a continuous map sending strata into strata whose
    induced map of strata posets is increasing."""
    if len(f) != len(x.space) or any(not 0 <= v < len(y.space) for v in f):
        raise OrderError("point function must be total on the source")
    if not is_continuous(f, x.space, y.space):
        return StratifiedCheck(None, "not-continuous")
    px, qx = poset_quotient(x.order)
    py, qy = poset_quotient(y.order)
    g: list[int | None] = [None] * len(px)
    for pt in range(len(x.space)):
        s, t = qx[pt], qy[f[pt]]
        if g[s] is None:
            g[s] = t
        elif g[s] != t:
            return StratifiedCheck(None, "splits-stratum")
    gg = tuple(int(v) for v in g)  # type: ignore[arg-type]
    if not is_monotone(gg, px, py):
        return StratifiedCheck(None, "g-not-increasing")
    return StratifiedCheck(gg)


# ---------------------------------------------------------------------------
# enumeration helpers


def _canonical_form(order: Preorder) -> tuple:
    """Lexicographically least relation matrix over relabelings that respect
    a degree-based invariant."""
    n = len(order)
    inv = [(sum(order.leq[j][x] for j in range(n)), sum(order.leq[x][j] for j in range(n))) for x in range(n)]
    classes: dict[tuple, list[int]] = {}
    for x in range(n):
        classes.setdefault(inv[x], []).append(x)
    keys = sorted(classes)
    best = None
    for choice in itertools.product(*(itertools.permutations(classes[k]) for k in keys)):
        seq = [x for part in choice for x in part]
        mat = tuple(order.leq[a][b] for a in seq for b in seq)
        if best is None or mat < best:
            best = mat
    return (n, best)


def iter_posets(n: int) -> Iterator[Poset]:
    """All posets on ``n`` elements up to isomorphism (labelled ``0..n-1``)."""
    if n == 0:
        yield Poset((), ())
        return
    seen = set()
    for p in iter_posets(n - 1):
        # add a new maximal element above an arbitrary down-closed set
        for bits in range(1 << (n - 1)):
            below = {i for i in range(n - 1) if bits >> i & 1}
            if any(j not in below for i in below for j in p.down(i)):
                continue
            m = [list(row) + [i in below] for i, row in enumerate(p.leq)]
            m.append([False] * (n - 1) + [True])
            q = Poset(tuple(range(n)), tuple(map(tuple, m)))
            key = _canonical_form(q)
            if key not in seen:
                seen.add(key)
                yield q


def iter_preorders(n: int) -> Iterator[Preorder]:
    """All pre-orders on ``n`` elements up to isomorphism."""
    seen = set()
    for k in range(1, n + 1) if n else [0]:
        for p in iter_posets(k):
            for sizes in _compositions(n, k):
                owner = [c for c, s in enumerate(sizes) for _ in range(s)]
                m = tuple(tuple(p.leq[owner[i]][owner[j]] for j in range(n)) for i in range(n))
                q = Preorder(tuple(range(n)), m)
                key = _canonical_form(q)
                if key not in seen:
                    seen.add(key)
                    yield q


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def random_poset(rng, n: int, density: float = 0.4) -> Poset:
    """Random poset: random upper-triangular relation, closed, then shuffled."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    p = Poset.from_index_pairs(n, pairs)
    perm = list(range(n))
    rng.shuffle(perm)
    return Poset(tuple(range(n)), p.relabel(perm).leq)


def all_point_maps(m: int, n: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(n), repeat=m)


def preimage_open_check(f: Sequence[int], source: FiniteSpace, target: FiniteSpace) -> bool:
    """Brute-force continuity: every open preimage is open (test oracle)."""
    return all(source.is_open({x for x in range(len(source)) if f[x] in u}) for u in target.opens)

