"""Exit paths of the symmetric product ``SP^n C``, modelled by braids.

Strata are indexed by partitions of ``n``.  Each stratum has a basepoint whose
collided points are the blocks of the canonical concrete partition:
consecutive intervals of ``1..n`` in weakly decreasing size.  A morphism
``x_P -> x_Q`` (``Q`` refining ``P``) is the class, modulo internal braids
``IB_P`` at the start, of a braid in ``B_n`` of the shape

    i * cable(b, w),     i in IB_P,

where ``w`` lists the sizes of the ``Q``-parts grouped consecutively inside the
``P``-blocks and ``b`` in ``B_|Q|`` carries the cables to the canonical
``Q``-blocks.  Braid words compose left to right, so ``i`` acts at the
``P`` end.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

from .braid import (
    BraidWord,
    Permutation,
    blocks_from_sizes,
    cable,
    forget_strands,
    parabolic_member,
    permutation_braid,
    permutation_of,
    permute_widths,
    random_block_word,
    random_word,
)

BRUTE_FORCE_LIMIT = 6


class SymProdError(ValueError):
    pass


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class AbstractPartition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p < 1 for p in parts):
            raise SymProdError(f"parts must be positive integers: {self.parts}")
        if list(parts) != sorted(parts, reverse=True):
            raise SymProdError(f"parts must be weakly decreasing: {self.parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, parts: Sequence[int]) -> AbstractPartition:
        """Sort into canonical order first."""
        return cls(tuple(sorted((int(p) for p in parts), reverse=True)))

    @classmethod
    def discrete(cls, n: int) -> AbstractPartition:
        return cls((1,) * n)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def canonical(self) -> ConcretePartition:
        return ConcretePartition(tuple(frozenset(b) for b in blocks_from_sizes(self.parts)))

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return blocks_from_sizes(self.parts)

    @cached_property
    def label(self) -> tuple[int, ...]:
        """0-based block index of each 0-based position in canonical form."""
        return tuple(b for b, p in enumerate(self.parts) for _ in range(p))

    def __str__(self):
        return "(" + "|".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class ConcretePartition:
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        if any(not b for b in blocks):
            raise SymProdError("empty block")
        union = set().union(*blocks) if blocks else set()
        if sum(map(len, blocks)) != len(union) or union != set(range(1, len(union) + 1)):
            raise SymProdError("blocks must partition 1..n")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(map(len, self.blocks))

    def shape(self) -> AbstractPartition:
        return AbstractPartition.of([len(b) for b in self.blocks])

    def related(self, i: int, j: int) -> bool:
        return any(i in b and j in b for b in self.blocks)

    def is_canonical(self) -> bool:
        return self == self.shape().canonical()


def partitions(n: int) -> list[AbstractPartition]:
    """All partitions of ``n``, coarsest first."""
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(AbstractPartition(tuple(acc)))
            return
        for p in range(min(rest, cap), 0, -1):
            rec(rest - p, p, acc + [p])

    rec(n, n, [])
    return out


@dataclass(frozen=True)
class StratumInfo:
    partition: AbstractPartition
    codimension: int


def stratum_info(p: AbstractPartition) -> StratumInfo:
    return StratumInfo(p, sum(x - 1 for x in p.parts))


# ---------------------------------------------------------------------------
# refinement patterns


def _split_choices(size: int, pool: Counter, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """Weakly decreasing sub-multisets of ``pool`` summing to ``size``."""
    if size == 0:
        yield ()
        return
    for part in sorted(pool, reverse=True):
        if pool[part] == 0 or part > size or (cap is not None and part > cap):
            continue
        pool[part] -= 1
        for rest in _split_choices(size - part, pool, part):
            yield (part,) + rest
        pool[part] += 1


def _patterns(p: AbstractPartition, q: AbstractPartition) -> Iterator[tuple[tuple[int, ...], ...]]:
    pool = Counter(q.parts)

    def rec(k):
        if k == len(p.parts):
            if not +pool:
                yield ()
            return
        for split in list(_split_choices(p.parts[k], pool)):
            pool.subtract(split)
            for rest in rec(k + 1):
                yield (split,) + rest
            pool.update(split)

    yield from rec(0)


def _check_same_n(p: AbstractPartition, q: AbstractPartition) -> None:
    if p.n != q.n:
        raise SymProdError(f"partitions of different sizes: {p.n} and {q.n}")


def refines(p: AbstractPartition, q: AbstractPartition) -> bool:
    """``P <= Q``: the parts of ``Q`` can be grouped to reassemble ``P``."""
    _check_same_n(p, q)
    return next(_patterns(p, q), None) is not None


@dataclass(frozen=True)
class RefinementPattern:
    P: AbstractPartition
    Q: AbstractPartition
    splits: tuple[tuple[int, ...], ...]
    representative: Permutation = field(compare=False, hash=False)

    def to_json(self) -> dict:
        return {
            "blocks": [{"size": s, "splits": list(sp)} for s, sp in zip(self.P.parts, self.splits)],
            "representative": self.representative.one_line(),
        }

    def is_identity(self) -> bool:
        return self.P == self.Q


def _assign_q_blocks(q: AbstractPartition, splits: Sequence[Sequence[int]]) -> list[list[int]]:
    """Greedy: for each split size take the first unused ``Q``-block of that size."""
    used = [False] * len(q.parts)
    out = []
    for split in splits:
        chosen = []
        for size in split:
            k = next(k for k, s in enumerate(q.parts) if s == size and not used[k])
            used[k] = True
            chosen.append(k)
        out.append(chosen)
    return out


def _representative(p: AbstractPartition, q: AbstractPartition, splits) -> Permutation:
    assigned = _assign_q_blocks(q, splits)
    images = [0] * p.n
    for blk, qks in zip(p.blocks, assigned):
        targets = [t - 1 for k in qks for t in q.blocks[k]]
        for j, t in zip(blk, targets):
            images[j - 1] = t
    return Permutation(tuple(images))


def double_cosets(p: AbstractPartition, q: AbstractPartition) -> list[RefinementPattern]:
    if not refines(p, q):
        raise SymProdError(f"{q} does not refine {p}")
    return [RefinementPattern(p, q, s, _representative(p, q, s)) for s in _patterns(p, q)]


def in_S_PQ(sigma: Permutation, p: AbstractPartition, q: AbstractPartition) -> bool:
    """``sigma(i) ~_Q sigma(j)`` implies ``i ~_P j`` (canonical forms)."""
    owner: dict[int, int] = {}
    for j in range(sigma.n):
        qb = q.label[sigma(j)]
        if owner.setdefault(qb, p.label[j]) != p.label[j]:
            return False
    return True


def pattern_of_permutation(sigma: Permutation, p: AbstractPartition, q: AbstractPartition) -> tuple[tuple[int, ...], ...]:
    if not in_S_PQ(sigma, p, q):
        raise SymProdError("permutation is not in S_{P,Q}")
    per_block: list[set[int]] = [set() for _ in p.parts]
    for j in range(sigma.n):
        per_block[p.label[j]].add(q.label[sigma(j)])
    return tuple(tuple(sorted((q.parts[k] for k in ks), reverse=True)) for ks in per_block)


def brute_force_double_cosets(p: AbstractPartition, q: AbstractPartition) -> list[frozenset[Permutation]]:
    """Orbits of ``IS_P x S_Q`` on ``S_{P,Q}`` by search over all of ``S_n``."""
    _check_same_n(p, q)
    n = p.n
    if n > BRUTE_FORCE_LIMIT:
        raise SymProdError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}")
    members = {Permutation(t) for t in itertools.permutations(range(n))}
    members = {s for s in members if in_S_PQ(s, p, q)}
    left = [Permutation.transposition(n, j) for blk in p.blocks for j in blk[:-1]]
    right = [Permutation.transposition(n, j) for blk in q.blocks for j in blk[:-1]]
    # swaps of equal-size Q-blocks generate the rest of S_Q
    for a, b in itertools.combinations(range(len(q.parts)), 2):
        if q.parts[a] == q.parts[b]:
            images = list(range(n))
            for x, y in zip(q.blocks[a], q.blocks[b]):
                images[x - 1], images[y - 1] = y - 1, x - 1
            right.append(Permutation(tuple(images)))
    orbits = []
    seen: set[Permutation] = set()
    for s in sorted(members, key=lambda s: s.images):
        if s in seen:
            continue
        orbit = {s}
        queue = deque([s])
        while queue:
            t = queue.popleft()
            for nb in [g * t for g in left] + [t * g for g in right]:
                if nb not in orbit:
                    orbit.add(nb)
                    queue.append(nb)
        seen |= orbit
        orbits.append(frozenset(orbit))
    return orbits


# ---------------------------------------------------------------------------
# braid side


def in_EBPQ(b: BraidWord, p: AbstractPartition, q: AbstractPartition, widths: Sequence[int] | None = None) -> bool:
    """Is ``cable(b, widths)`` an external braid from ``x_P`` to ``x_Q``?

    ``widths`` are the start widths of the cables (default: the canonical
    ``Q`` layout).  The cables must end on the canonical ``Q``-blocks and the
    induced permutation must lie in ``S_{P,Q}``.
    """
    _check_same_n(p, q)
    if b.n != len(q.parts):
        raise SymProdError(f"braid has {b.n} strands, Q has {len(q.parts)} parts")
    widths = tuple(q.parts if widths is None else widths)
    if sorted(widths, reverse=True) != list(q.parts):
        raise SymProdError("widths must be a rearrangement of the parts of Q")
    if permute_widths(widths, permutation_of(b)) != q.parts:
        return False
    return in_S_PQ(permutation_of(cable(b, widths)), p, q)


@dataclass(frozen=True)
class Decomposition:
    """``braid = internal * cable(external, widths)`` with ``internal`` in ``IB_P``."""

    internal: BraidWord
    external: BraidWord
    widths: tuple[int, ...]


def _decompose(p: AbstractPartition, q: AbstractPartition, braid: BraidWord) -> Decomposition | None:
    sigma = permutation_of(braid)
    if not in_S_PQ(sigma, p, q):
        return None
    n = p.n
    new_pos = [0] * n
    widths = []
    for blk in p.blocks:
        js = [j - 1 for j in blk]
        chunks = sorted({q.label[sigma(j)] for j in js}, key=lambda k: (-q.parts[k], k))
        pos = blk[0] - 1
        for k in chunks:
            for j in sorted((j for j in js if q.label[sigma(j)] == k), key=sigma):
                new_pos[j] = pos
                pos += 1
            widths.append(q.parts[k])
    sort = permutation_braid(Permutation(tuple(new_pos)))
    gamma = sort.inverse() * braid
    firsts = list(itertools.accumulate([1] + widths[:-1]))
    external = forget_strands(gamma, firsts)
    if permute_widths(widths, permutation_of(external)) != q.parts:
        return None
    rest = gamma * cable(external, widths).inverse()
    if not parabolic_member(rest, p.blocks):
        return None
    return Decomposition(sort * rest, external, tuple(widths))


@dataclass(frozen=True)
class HomMorphism:
    """A representative braid of a morphism ``x_P -> x_Q``; validated on
    construction."""

    P: AbstractPartition
    Q: AbstractPartition
    braid: BraidWord

    def __post_init__(self):
        if self.braid.n != self.P.n:
            raise SymProdError(f"braid has {self.braid.n} strands, expected {self.P.n}")
        if not refines(self.P, self.Q):
            raise SymProdError(f"{self.Q} does not refine {self.P}")
        if self.decomposition is None:
            raise SymProdError("braid is not an internal braid times a cabled external braid")

    @property
    def n(self) -> int:
        return self.P.n

    @cached_property
    def decomposition(self) -> Decomposition | None:
        return _decompose(self.P, self.Q, self.braid)

    @cached_property
    def permutation(self) -> Permutation:
        return permutation_of(self.braid)

    def to_json(self) -> dict:
        return {"n": self.n, "P": list(self.P.parts), "Q": list(self.Q.parts), "braid": str(self.braid)}

    @classmethod
    def from_json(cls, payload: dict) -> HomMorphism:
        if set(payload) != {"n", "P", "Q", "braid"}:
            raise SymProdError("morphism needs exactly 'n', 'P', 'Q' and 'braid'")
        n = int(payload["n"])
        p, q = AbstractPartition(tuple(payload["P"])), AbstractPartition(tuple(payload["Q"]))
        if p.n != n or q.n != n:
            raise SymProdError(f"partitions must sum to n={n}")
        return cls(p, q, BraidWord.parse(str(payload["braid"]), n))


def identity_morphism(p: AbstractPartition) -> HomMorphism:
    return HomMorphism(p, p, BraidWord(p.n))


def pattern_braid(pattern: RefinementPattern) -> BraidWord:
    """A cabled positive permutation braid realising the pattern's representative."""
    p, q = pattern.P, pattern.Q
    assigned = _assign_q_blocks(q, pattern.splits)
    widths = [q.parts[k] for ks in assigned for k in ks]
    targets = [k for ks in assigned for k in ks]
    return cable(permutation_braid(Permutation(tuple(targets))), widths)


def realize(pattern: RefinementPattern) -> HomMorphism:
    return HomMorphism(pattern.P, pattern.Q, pattern_braid(pattern))


def hom_equal(m: HomMorphism, m2: HomMorphism) -> bool:
    if (m.P, m.Q) != (m2.P, m2.Q):
        raise SymProdError("morphisms have different endpoints")
    return parabolic_member(m.braid * m2.braid.inverse(), m.P.blocks)


def compose(m: HomMorphism, m2: HomMorphism) -> HomMorphism:
    """``x_P -> x_Q -> x_R``; the class lives in ``IB_P \\ EB_{P,R}``."""
    if m.Q != m2.P:
        raise SymProdError(f"cannot compose: {m.Q} != {m2.P}")
    return HomMorphism(m.P, m2.Q, m.braid * m2.braid)


def project_pi0(m: HomMorphism) -> RefinementPattern:
    splits = pattern_of_permutation(m.permutation, m.P, m.Q)
    return RefinementPattern(m.P, m.Q, splits, _representative(m.P, m.Q, splits))


def exactness_witness(m: HomMorphism, m2: HomMorphism) -> BraidWord:
    """For morphisms with the same pattern, a cabled external braid ``e`` of
    ``x_Q`` with ``m * e`` equivalent to ``m2``."""
    if project_pi0(m) != project_pi0(m2):
        raise SymProdError("morphisms lie over different patterns")
    d, d2 = m.decomposition, m2.decomposition
    assert d.widths == d2.widths
    return cable(d.external.inverse() * d2.external, m.Q.parts)


# ---------------------------------------------------------------------------
# fundamental group of a stratum


@dataclass(frozen=True)
class StratumGroup:
    """``pi_1`` of the stratum ``X^P`` as ``EB_P``: braids on the ``|P|``
    collided points whose permutation only swaps parts of equal size."""

    partition: AbstractPartition

    @property
    def strands(self) -> int:
        return len(self.partition.parts)

    @property
    def size_classes(self) -> tuple[tuple[int, ...], ...]:
        """1-based part indices grouped by size: ``ES_P`` permutes inside these."""
        out: dict[int, list[int]] = {}
        for k, s in enumerate(self.partition.parts, start=1):
            out.setdefault(s, []).append(k)
        return tuple(tuple(v) for v in out.values())

    def external_symmetry_order(self) -> int:
        return math.prod(math.factorial(len(c)) for c in self.size_classes)

    def contains(self, b: BraidWord) -> bool:
        if b.n != self.strands:
            raise SymProdError(f"expected a braid on {self.strands} strands")
        return permute_widths(self.partition.parts, permutation_of(b)) == self.partition.parts

    def to_json(self) -> dict:
        return {
            "partition": list(self.partition.parts),
            "strands": self.strands,
            "size_classes": [list(c) for c in self.size_classes],
            "external_symmetry_order": self.external_symmetry_order(),
        }


def stratum_pi1(p: AbstractPartition) -> StratumGroup:
    return StratumGroup(p)


# ---------------------------------------------------------------------------
# branched cover


@dataclass(frozen=True)
class BranchedCover:
    """The constructible set-valued functor ``x_P -> IS_P \\ S_n``.

    The coset ``IS_P tau`` is stored as the tuple ``label`` with
    ``label[tau(i)]`` the ``P``-block of ``i``.  A morphism ``x_P -> x_Q``
    with permutation ``sigma`` maps ``IS_Q tau`` to ``IS_P sigma tau``, so the
    functor is contravariant on representatives.
    """

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= BRUTE_FORCE_LIMIT:
            raise SymProdError(f"branched cover limited to 1 <= n <= {BRUTE_FORCE_LIMIT}")

    def fibre(self, p: AbstractPartition) -> list[tuple[int, ...]]:
        if p.n != self.n:
            raise SymProdError(f"partition of {p.n}, expected {self.n}")
        return sorted(set(itertools.permutations(p.label)))

    def coset_of(self, p: AbstractPartition, tau: Permutation) -> tuple[int, ...]:
        label = [0] * self.n
        for i in range(self.n):
            label[tau(i)] = p.label[i]
        return tuple(label)

    def on_morphism(self, m: HomMorphism) -> dict[tuple[int, ...], tuple[int, ...]]:
        if m.n != self.n:
            raise SymProdError("morphism on the wrong number of strands")
        inv = m.permutation.inverse()
        to_p = {k: m.P.label[inv(blk[0] - 1)] for k, blk in enumerate(m.Q.blocks)}
        return {lab: tuple(to_p[x] for x in lab) for lab in self.fibre(m.Q)}


def branched_cover(n: int) -> BranchedCover:
    return BranchedCover(n)


# ---------------------------------------------------------------------------
# sampling


def random_partition(rng: random.Random, n: int) -> AbstractPartition:
    return rng.choice(partitions(n))


def random_refinement(rng: random.Random, p: AbstractPartition) -> AbstractPartition:
    parts = []
    for size in p.parts:
        cuts = sorted(rng.sample(range(1, size), rng.randint(0, size - 1)))
        bounds = [0] + cuts + [size]
        parts.extend(b - a for a, b in zip(bounds, bounds[1:]))
    return AbstractPartition.of(parts)


def random_morphism(rng: random.Random, p: AbstractPartition, q: AbstractPartition, length: int = 6) -> HomMorphism:
    """A random representative: random internal braid, random pattern, random
    chunk order, random external braid."""
    pattern = rng.choice(double_cosets(p, q))
    pool = {}
    for k, s in enumerate(q.parts):
        pool.setdefault(s, []).append(k)
    for ks in pool.values():
        rng.shuffle(ks)
    widths, targets = [], []
    for split in pattern.splits:
        split = list(split)
        rng.shuffle(split)
        for s in split:
            widths.append(s)
            targets.append(pool[s].pop())
    r = random_word(rng, len(q.parts), length)
    b = r * permutation_braid(permutation_of(r).inverse() * Permutation(tuple(targets)))
    i = random_block_word(rng, p.parts, length)
    return HomMorphism(p, q, i * cable(b, widths))


def random_internal(rng: random.Random, p: AbstractPartition, length: int = 6) -> BraidWord:
    return random_block_word(rng, p.parts, length)
