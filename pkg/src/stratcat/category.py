"""Fundamental categories of finite po-spaces, presented categories and
their localisation at all morphisms.

For a finite poset ``P`` with the Alexandrov topology, every po-path is
homotopic to one that jumps straight from its start to its end, so the
fundamental category is ``P`` itself viewed as a thin category.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .groups import GroupPresentation, Inconclusive, free_reduce, invert
from .order import Poset

PRESENT_POSET_LIMIT = 12
WORD_CAP = 12


class CategoryError(ValueError):
    pass


@dataclass(frozen=True)
class ThinCategory:
    objects: tuple
    hom: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        n = len(self.objects)
        for x in range(n):
            if not self.hom[x][x]:
                raise CategoryError("missing identity")
            for y in range(n):
                if self.hom[x][y]:
                    for z in range(n):
                        if self.hom[y][z] and not self.hom[x][z]:
                            raise CategoryError("hom relation is not closed under composition")

    def morphism_count(self) -> int:
        return sum(map(sum, self.hom))


def poset_category(p: Poset) -> ThinCategory:
    return ThinCategory(p.elements, p.leq)


# ---------------------------------------------------------------------------
# presented categories


@dataclass(frozen=True)
class Arrow:
    name: str
    src: int
    dst: int


@dataclass(frozen=True)
class FinPresCategory:
    """Generating arrows between objects, with relations between parallel paths.

    Paths are tuples of arrow names read left to right (first arrow first).
    An empty path is the identity; a relation may equate a loop with it.
    """

    objects: tuple
    arrows: tuple[Arrow, ...]
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        object.__setattr__(self, "relations", tuple((tuple(u), tuple(v)) for u, v in self.relations))
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise CategoryError("duplicate arrow names")
        for a in self.arrows:
            if not (0 <= a.src < len(self.objects) and 0 <= a.dst < len(self.objects)):
                raise CategoryError(f"arrow {a.name} has a bad endpoint")
        for u, v in self.relations:
            if not u and not v:
                raise CategoryError("relation between two identities")
            eu, ev = self.endpoints(u), self.endpoints(v)
            if eu is None or ev is None:
                if eu is None and ev is None:
                    raise CategoryError("relation between two identities")
                e = eu or ev
                if e[0] != e[1]:
                    raise CategoryError("identity related to a non-loop")
            elif eu != ev:
                raise CategoryError(f"relation {u} = {v} is not between parallel paths")

    @property
    def arrow_map(self) -> dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    def endpoints(self, path: Sequence[str]) -> tuple[int, int] | None:
        if not path:
            return None
        amap = self.arrow_map
        try:
            arrows = [amap[name] for name in path]
        except KeyError as exc:
            raise CategoryError(f"unknown arrow {exc.args[0]}") from None
        for a, b in zip(arrows, arrows[1:]):
            if a.dst != b.src:
                raise CategoryError(f"path {path} is not composable")
        return arrows[0].src, arrows[-1].dst

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "arrows": [{"name": a.name, "src": a.src, "dst": a.dst} for a in self.arrows],
            "relations": [[list(u), list(v)] for u, v in self.relations],
        }

    @classmethod
    def from_json(cls, payload: dict) -> FinPresCategory:
        if set(payload) != {"objects", "arrows", "relations"}:
            raise CategoryError("category needs exactly 'objects', 'arrows' and 'relations'")
        arrows = []
        for a in payload["arrows"]:
            if set(a) != {"name", "src", "dst"}:
                raise CategoryError("arrows need exactly 'name', 'src' and 'dst'")
            arrows.append(Arrow(str(a["name"]), int(a["src"]), int(a["dst"])))
        return cls(tuple(payload["objects"]), tuple(arrows), tuple((tuple(u), tuple(v)) for u, v in payload["relations"]))


def _paths(cat: FinPresCategory, src: int, dst: int, cap: int) -> list[tuple[str, ...]]:
    """All generator paths ``src -> dst`` of length at most ``cap``.

    Raises :class:`Inconclusive` if longer paths between the endpoints exist.
    """
    out_arrows: dict[int, list[Arrow]] = {}
    for a in cat.arrows:
        out_arrows.setdefault(a.src, []).append(a)
    reach = _reaches(cat, dst)
    found = [()] if src == dst else []
    stack: list[tuple[int, tuple[str, ...]]] = [(src, ())]
    while stack:
        obj, path = stack.pop()
        for a in out_arrows.get(obj, []):
            if a.dst not in reach:
                continue
            if len(path) == cap:
                raise Inconclusive(f"paths from {src} to {dst} exceed length {cap}")
            nxt = path + (a.name,)
            if a.dst == dst:
                found.append(nxt)
            stack.append((a.dst, nxt))
    return sorted(found, key=lambda p: (len(p), p))


def _reaches(cat: FinPresCategory, dst: int) -> set[int]:
    into: dict[int, list[int]] = {}
    for a in cat.arrows:
        into.setdefault(a.dst, []).append(a.src)
    seen = {dst}
    todo = [dst]
    while todo:
        x = todo.pop()
        for y in into.get(x, []):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def hom_classes(cat: FinPresCategory, src: int, dst: int, cap: int = WORD_CAP) -> list[list[tuple[str, ...]]]:
    """Equivalence classes of paths ``src -> dst`` under the relations.

    Breadth-first rewriting with every relation in both directions at every
    position; a rewrite longer than ``cap`` raises :class:`Inconclusive`.
    """
    paths = _paths(cat, src, dst, cap)
    rules = [(u, v) for u, v in cat.relations] + [(v, u) for u, v in cat.relations]
    cls_of: dict[tuple[str, ...], int] = {}
    classes: list[list[tuple[str, ...]]] = []
    for start in paths:
        if start in cls_of:
            continue
        idx = len(classes)
        members = [start]
        cls_of[start] = idx
        queue = deque([start])
        while queue:
            w = queue.popleft()
            for lhs, rhs in rules:
                k = len(lhs)
                for pos in range(len(w) - k + 1 if k else len(w) + 1):
                    if w[pos : pos + k] != lhs:
                        continue
                    if not lhs and _endpoint_at(cat, w, pos, src) != _loop_base(cat, rhs):
                        continue
                    nw = w[:pos] + rhs + w[pos + k :]
                    if len(nw) > cap:
                        raise Inconclusive(f"rewriting exceeded length {cap}")
                    if nw in cls_of:
                        if cls_of[nw] != idx:
                            raise AssertionError("rewriting closure merged two finished classes")
                        continue
                    cls_of[nw] = idx
                    members.append(nw)
                    queue.append(nw)
        classes.append(sorted(members, key=lambda p: (len(p), p)))
    return classes


def _endpoint_at(cat: FinPresCategory, w: tuple[str, ...], pos: int, src: int) -> int:
    if pos == 0:
        return src
    return cat.arrow_map[w[pos - 1]].dst


def _loop_base(cat: FinPresCategory, loop: tuple[str, ...]) -> int:
    return cat.arrow_map[loop[0]].src


def present_poset(p: Poset) -> FinPresCategory:
    """Generators are the covering relations; one relation per extra directed
    Hasse path between each pair of endpoints."""
    if len(p) > PRESENT_POSET_LIMIT:
        raise CategoryError(f"poset too large to present (limit {PRESENT_POSET_LIMIT})")
    covers = p.covers()
    arrows = tuple(Arrow(f"e{k}", x, y) for k, (x, y) in enumerate(covers))
    cat = FinPresCategory(p.elements, arrows)
    relations = []
    n = len(p)
    for x in range(n):
        for y in range(n):
            if x == y or not p.leq[x][y]:
                continue
            paths = _paths(cat, x, y, n)
            relations.extend((paths[0], other) for other in paths[1:])
    return FinPresCategory(p.elements, arrows, tuple(relations))


# ---------------------------------------------------------------------------
# real projective space


@dataclass(frozen=True)
class SignedSkeleton:
    """Skeleton of the fundamental category of ``RP^n`` on the stratum
    basepoints ``x_0..x_n``: ``hom(x_i, x_j) = {+1, -1}`` for ``i < j``,
    composition is multiplication of signs."""

    n: int

    def hom(self, i: int, j: int) -> frozenset[int]:
        if i == j:
            return frozenset({1})
        return frozenset({1, -1}) if i < j else frozenset()

    @staticmethod
    def compose(a: int, b: int) -> int:
        return a * b

    @staticmethod
    def sign(path: Sequence[str]) -> int:
        """Sign of a path in :func:`rp_skeleton` (``a_i`` is +1, ``b_i`` is -1)."""
        s = 1
        for name in path:
            if name.startswith("b"):
                s = -s
        return s


def rp_skeleton(n: int) -> FinPresCategory:
    """Generators ``a_i, b_i : x_{i-1} -> x_i``; for consecutive pairs the
    sign relations ``a_i a_{i+1} = b_i b_{i+1}`` and ``a_i b_{i+1} = b_i a_{i+1}``."""
    if n < 1:
        raise CategoryError("n must be at least 1")
    objects = tuple(f"x{i}" for i in range(n + 1))
    arrows = []
    for i in range(1, n + 1):
        arrows += [Arrow(f"a{i}", i - 1, i), Arrow(f"b{i}", i - 1, i)]
    relations = []
    for i in range(1, n):
        relations.append(((f"a{i}", f"a{i+1}"), (f"b{i}", f"b{i+1}")))
        relations.append(((f"a{i}", f"b{i+1}"), (f"b{i}", f"a{i+1}")))
    return FinPresCategory(objects, tuple(arrows), tuple(relations))


# ---------------------------------------------------------------------------
# localisation


def spanning_tree(cat: FinPresCategory, base: int) -> list[int]:
    """Arrow indices of a BFS spanning tree, arrows usable in both directions."""
    incident: dict[int, list[tuple[int, int]]] = {}
    for k, a in enumerate(cat.arrows):
        incident.setdefault(a.src, []).append((k, a.dst))
        incident.setdefault(a.dst, []).append((k, a.src))
    seen = {base}
    tree = []
    queue = deque([base])
    while queue:
        x = queue.popleft()
        for k, y in incident.get(x, []):
            if y not in seen:
                seen.add(y)
                tree.append(k)
                queue.append(y)
    if len(seen) != len(cat.objects):
        raise CategoryError("generator graph is disconnected")
    return tree


def localize_vertex_group(cat: FinPresCategory, base: int = 0) -> GroupPresentation:
    """Vertex group at ``base`` of the groupoid obtained by inverting every arrow."""
    if not 0 <= base < len(cat.objects):
        raise CategoryError(f"no object {base}")
    tree = spanning_tree(cat, base)
    index = {a.name: k for k, a in enumerate(cat.arrows)}
    relators = [((k, 1),) for k in tree]
    for u, v in cat.relations:
        word = tuple((index[x], 1) for x in u) + invert(tuple((index[x], 1) for x in v))
        relators.append(free_reduce(word))
    return GroupPresentation(tuple(a.name for a in cat.arrows), tuple(relators))
