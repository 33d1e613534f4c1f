"""Finitely presented groups: bounded coset enumeration and abelianization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

Word = tuple[tuple[int, int], ...]  # (generator index, +1 | -1)


class Inconclusive(RuntimeError):
    """A bounded procedure ran out of room before reaching an answer."""


def free_reduce(word) -> Word:
    out: list[tuple[int, int]] = []
    for g, e in word:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def invert(word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


@dataclass(frozen=True)
class GroupPresentation:
    """Generators by name; relators as words of ``(index, sign)``.

    In JSON a relator is a list of tokens where a generator name means the
    generator and its upper-cased name means the inverse, e.g.
    ``{"generators": ["a", "b"], "relators": [["a", "a"], ["a", "B"]]}``.
    """

    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        rels = []
        for r in self.relators:
            r = free_reduce(r)
            if any(not 0 <= g < len(self.generators) for g, _ in r):
                raise ValueError("relator uses an unknown generator")
            if r:
                rels.append(r)
        object.__setattr__(self, "relators", tuple(rels))

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": [[self.generators[g] if e > 0 else self.generators[g].upper() for g, e in r] for r in self.relators],
        }

    @classmethod
    def from_json(cls, payload: dict) -> GroupPresentation:
        if set(payload) != {"generators", "relators"}:
            raise ValueError("group presentation needs exactly 'generators' and 'relators'")
        gens = tuple(payload["generators"])
        for g in gens:
            if not isinstance(g, str) or g != g.lower() or g == g.upper():
                raise ValueError(f"generator names must be lower case with a letter: {g!r}")
        table = {g: (i, 1) for i, g in enumerate(gens)}
        table.update({g.upper(): (i, -1) for i, g in enumerate(gens)})
        if len(table) != 2 * len(gens):
            raise ValueError("duplicate generator names")
        try:
            rels = tuple(tuple(table[t] for t in r) for r in payload["relators"])
        except KeyError as exc:
            raise ValueError(f"unknown relator token {exc.args[0]!r}") from None
        return cls(gens, rels)


# ---------------------------------------------------------------------------
# Todd-Coxeter (HLT strategy) for the trivial subgroup


class _CosetTable:
    def __init__(self, ngens: int, bound: int):
        self.ncols = 2 * ngens
        self.bound = bound
        self.table: list[list[int | None]] = [[None] * self.ncols]
        self.parent = [0]
        self.live = 1
        self.hard_cap = 64 * bound + 1024

    @staticmethod
    def col(g: int, e: int) -> int:
        return 2 * g + (0 if e > 0 else 1)

    @staticmethod
    def inv(c: int) -> int:
        return c ^ 1

    def rep(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def is_live(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int) -> int:
        if self.live >= self.bound or len(self.table) >= self.hard_cap:
            raise Inconclusive(f"coset table exceeded bound {self.bound}")
        d = len(self.table)
        self.table.append([None] * self.ncols)
        self.parent.append(d)
        self.live += 1
        self.table[c][x] = d
        self.table[d][self.inv(x)] = c
        return d

    def _merge(self, k: int, l: int, queue: list[int]) -> None:
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        lo, hi = min(k, l), max(k, l)
        self.parent[hi] = lo
        self.live -= 1
        queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(self.ncols):
                d = self.table[g][x]
                if d is None:
                    continue
                self.table[d][self.inv(x)] = None
                mu, nu = self.rep(g), self.rep(d)
                if self.table[mu][x] is not None:
                    self._merge(nu, self.table[mu][x], queue)
                elif self.table[nu][self.inv(x)] is not None:
                    self._merge(mu, self.table[nu][self.inv(x)], queue)
                else:
                    self.table[mu][x] = nu
                    self.table[nu][self.inv(x)] = mu

    def scan_and_fill(self, alpha: int, word: Sequence[int]) -> None:
        t = self.table
        f, b = alpha, alpha
        i, j = 0, len(word) - 1
        while True:
            while i <= j and t[f][word[i]] is not None:
                f = t[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][self.inv(word[j])] is not None:
                b = t[b][self.inv(word[j])]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][word[i]] = b
                t[b][self.inv(word[i])] = f
                return
            self.define(f, word[i])

    def trace(self, c: int, word: Sequence[int]) -> int | None:
        for x in word:
            c = self.table[c][x]
            if c is None:
                return None
            c = self.rep(c)
        return c


def coset_enumerate(group: GroupPresentation, bound: int = 1000) -> int:
    """Order of the group, if the enumeration closes within ``bound`` live cosets.

    Raises :class:`Inconclusive` otherwise; never returns a wrong order.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    ngens = len(group.generators)
    if ngens == 0:
        return 1
    ct = _CosetTable(ngens, bound)
    words = [[ct.col(g, e) for g, e in r] for r in group.relators]
    alpha = 0
    while alpha < len(ct.table):
        if ct.is_live(alpha):
            for w in words:
                if not ct.is_live(alpha):
                    break
                ct.scan_and_fill(alpha, w)
            if ct.is_live(alpha):
                for x in range(ct.ncols):
                    if ct.table[alpha][x] is None:
                        ct.define(alpha, x)
        alpha += 1
    live = [c for c in range(len(ct.table)) if ct.is_live(c)]
    for c in live:
        if any(ct.table[c][x] is None for x in range(ct.ncols)):
            raise Inconclusive("coset table did not close")
        if any(ct.trace(c, w) != c for w in words):
            raise Inconclusive("coset table inconsistent with relators")
    return len(live)


# ---------------------------------------------------------------------------
# abelianization


def smith_invariants(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Non-zero invariant factors ``d_1 | d_2 | ...`` of an integer matrix."""
    a = [list(map(int, row)) for row in matrix]
    if not a or not a[0]:
        return []
    rows, cols = len(a), len(a[0])
    diag = []
    top = 0
    while top < min(rows, cols):
        entries = [(abs(a[i][j]), i, j) for i in range(top, rows) for j in range(top, cols) if a[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        a[top], a[pi] = a[pi], a[top]
        for row in a:
            row[top], row[pj] = row[pj], row[top]
        while True:
            p = a[top][top]
            dirty = False
            for i in range(top + 1, rows):
                if a[i][top]:
                    q = a[i][top] // p
                    for j in range(top, cols):
                        a[i][j] -= q * a[top][j]
                    if a[i][top]:
                        dirty = True
            for j in range(top + 1, cols):
                if a[top][j]:
                    q = a[top][j] // p
                    for i in range(top, rows):
                        a[i][j] -= q * a[i][top]
                    if a[top][j]:
                        dirty = True
            if not dirty:
                # pivot must divide the rest of the block
                bad = next(
                    ((i, j) for i in range(top + 1, rows) for j in range(top + 1, cols) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                i, _ = bad
                for j in range(top, cols):
                    a[top][j] += a[i][j]
                continue
            entries = [(abs(a[i][j]), i, j) for i in range(top, rows) for j in (top,) if a[i][j]]
            entries += [(abs(a[top][j]), top, j) for j in range(top, cols) if a[top][j]]
            _, pi, pj = min(entries)
            a[top], a[pi] = a[pi], a[top]
            for row in a:
                row[top], row[pj] = row[pj], row[top]
        diag.append(abs(a[top][top]))
        top += 1
    return diag


@dataclass(frozen=True)
class Abelianization:
    torsion: tuple[int, ...]
    rank: int

    def to_json(self) -> dict:
        return {"torsion": list(self.torsion), "rank": self.rank}


def relator_matrix(group: GroupPresentation) -> list[list[int]]:
    m = []
    for r in group.relators:
        row = [0] * len(group.generators)
        for g, e in r:
            row[g] += e
        m.append(row)
    return m


def abelianization(group: GroupPresentation) -> Abelianization:
    ngens = len(group.generators)
    d = smith_invariants(relator_matrix(group)) if group.relators and ngens else []
    return Abelianization(tuple(x for x in d if x > 1), ngens - len(d))
