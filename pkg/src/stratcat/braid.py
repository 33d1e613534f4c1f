"""Artin braid groups: words, left-weighted Garside normal forms, and friends.

Conventions used throughout the package:

* ``s_i`` (``i`` in ``1..n-1``) crosses the strand at position ``i`` over the
  strand at position ``i+1``.
* Words are read left to right: ``u * v`` means "do ``u``, then ``v``".
* A :class:`Permutation` acts on positions.  ``perm[j]`` is the final
  position of the strand that starts at position ``j`` (0-based internally,
  printed 1-based).

A braid is in left normal form ``Delta^k A_1 ... A_r`` where each ``A_t`` is a
positive permutation braid (stored as its permutation), no ``A_t`` is the
identity or ``Delta``, and ``start(A_{t+1})`` is contained in
``finish(A_t)``.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class BraidError(ValueError):
    pass


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise BraidError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int) -> Permutation:
        """The transposition of 1-based positions ``i`` and ``i+1``."""
        images = list(range(n))
        images[i - 1], images[i] = images[i], images[i - 1]
        return cls(tuple(images))

    @classmethod
    def from_one_line(cls, images: Sequence[int]) -> Permutation:
        return cls(tuple(x - 1 for x in images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        return self.images[j]

    def __mul__(self, other: Permutation) -> Permutation:
        # left to right: apply self first
        return Permutation(tuple(other.images[x] for x in self.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for j, x in enumerate(self.images):
            inv[x] = j
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(j == x for j, x in enumerate(self.images))

    def one_line(self) -> list[int]:
        return [x + 1 for x in self.images]

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, 1-based."""
        seen = set()
        out = []
        for j in range(self.n):
            if j in seen or self.images[j] == j:
                continue
            cyc = []
            k = j
            while k not in seen:
                seen.add(k)
                cyc.append(k + 1)
                k = self.images[k]
            out.append(tuple(cyc))
        return out

    def __str__(self):
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"


# ---------------------------------------------------------------------------
# words


_TOKEN = re.compile(r"^s(\d+)(\^-1)?$")


@dataclass(frozen=True)
class BraidWord:
    """A word in the Artin generators of ``B_n``.

    ``letters`` is a tuple of ``(i, sign)`` with ``1 <= i <= n-1`` and
    ``sign`` in ``{+1, -1}``.
    """

    n: int
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise BraidError("a braid needs at least one strand")
        letters = tuple((int(i), int(s)) for i, s in self.letters)
        for i, s in letters:
            if not 1 <= i <= self.n - 1:
                raise BraidError(f"generator s{i} out of range for n={self.n}")
            if s not in (1, -1):
                raise BraidError(f"bad sign {s}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> BraidWord:
        """Parse ``"n=3 s1 s2^-1"`` (header optional when ``n`` is given)."""
        tokens = text.split()
        if tokens and tokens[0].startswith("n="):
            header = int(tokens.pop(0)[2:])
            if n is not None and n != header:
                raise BraidError(f"header n={header} disagrees with n={n}")
            n = header
        if n is None:
            raise BraidError("strand count missing: give n or an 'n=<k>' header")
        letters = []
        for tok in tokens:
            m = _TOKEN.match(tok)
            if m is None:
                raise BraidError(f"bad braid token {tok!r}")
            letters.append((int(m.group(1)), -1 if m.group(2) else 1))
        return cls(n, tuple(letters))

    @classmethod
    def from_json(cls, payload, n: int) -> BraidWord:
        if isinstance(payload, str):
            payload = json.loads(payload)
        return cls(n, tuple((int(i), int(s)) for i, s in payload))

    @classmethod
    def generator(cls, n: int, i: int, sign: int = 1) -> BraidWord:
        return cls(n, ((i, sign),))

    def to_json(self) -> list[list[int]]:
        return [[i, s] for i, s in self.letters]

    def __str__(self):
        return " ".join(f"s{i}" if s > 0 else f"s{i}^-1" for i, s in self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: BraidWord) -> BraidWord:
        if self.n != other.n:
            raise BraidError(f"strand counts differ: {self.n} vs {other.n}")
        return BraidWord(self.n, self.letters + other.letters)

    def __pow__(self, k: int) -> BraidWord:
        base = self if k >= 0 else self.inverse()
        return BraidWord(self.n, base.letters * abs(k))

    def inverse(self) -> BraidWord:
        return BraidWord(self.n, tuple((i, -s) for i, s in reversed(self.letters)))

    def shifted(self, offset: int, n: int) -> BraidWord:
        """The same word acting on strands ``offset+1 .. offset+self.n`` of ``B_n``."""
        return BraidWord(n, tuple((i + offset, s) for i, s in self.letters))

    def free_reduce(self) -> BraidWord:
        out: list[tuple[int, int]] = []
        for i, s in self.letters:
            if out and out[-1] == (i, -s):
                out.pop()
            else:
                out.append((i, s))
        return BraidWord(self.n, tuple(out))


def delta(n: int) -> BraidWord:
    """Positive half twist."""
    return permutation_braid(Permutation(tuple(reversed(range(n)))))


def permutation_of(w: BraidWord) -> Permutation:
    images = list(range(w.n))
    arr = list(range(w.n))  # arr[position] = strand
    for i, _ in w.letters:
        arr[i - 1], arr[i] = arr[i], arr[i - 1]
    for pos, strand in enumerate(arr):
        images[strand] = pos
    return Permutation(tuple(images))


def permutation_braid(p: Permutation) -> BraidWord:
    """The positive braid in which strands cross at most once, realising ``p``."""
    target = p.images
    arr = list(range(p.n))
    letters = []
    done = False
    while not done:
        done = True
        for pos in range(p.n - 1):
            if target[arr[pos]] > target[arr[pos + 1]]:
                arr[pos], arr[pos + 1] = arr[pos + 1], arr[pos]
                letters.append((pos + 1, 1))
                done = False
    return BraidWord(p.n, tuple(letters))


# ---------------------------------------------------------------------------
# Garside normal form


@lru_cache(maxsize=None)
def _start_set(a: tuple[int, ...]) -> frozenset[int]:
    return frozenset(i for i in range(len(a) - 1) if a[i] > a[i + 1])


@lru_cache(maxsize=None)
def _finish_set(a: tuple[int, ...]) -> frozenset[int]:
    inv = [0] * len(a)
    for j, x in enumerate(a):
        inv[x] = j
    return frozenset(i for i in range(len(a) - 1) if inv[i] > inv[i + 1])


@lru_cache(maxsize=1 << 20)
def _left_weight(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Move generators from the front of ``b`` onto the back of ``a`` until
    ``start(b) <= finish(a)``."""
    while True:
        extra = _start_set(b) - _finish_set(a)
        if not extra:
            return a, b
        i = min(extra)
        # a := a * s_i swaps the values i, i+1
        a = tuple(i + 1 if x == i else i if x == i + 1 else x for x in a)
        # b := s_i^-1 * b swaps the entries at i, i+1
        bl = list(b)
        bl[i], bl[i + 1] = bl[i + 1], bl[i]
        b = tuple(bl)


@lru_cache(maxsize=None)
def _tau(a: tuple[int, ...]) -> tuple[int, ...]:
    """Conjugation by Delta."""
    n = len(a)
    return tuple(n - 1 - a[n - 1 - j] for j in range(n))


@lru_cache(maxsize=None)
def _delta_over_generator(n: int, i: int) -> tuple[int, ...]:
    """Permutation of the simple element ``Delta * s_i^-1`` (``i`` 0-based)."""
    d = list(reversed(range(n)))
    return tuple(i + 1 if x == i else i if x == i + 1 else x for x in d)


@lru_cache(maxsize=None)
def _generator(n: int, i: int) -> tuple[int, ...]:
    a = list(range(n))
    a[i], a[i + 1] = a[i + 1], a[i]
    return tuple(a)


@dataclass(frozen=True)
class GarsideNormalForm:
    n: int
    delta_exp: int
    factors: tuple[Permutation, ...]

    def to_word(self) -> BraidWord:
        w = delta(self.n) ** self.delta_exp if self.n > 1 else BraidWord(1)
        for f in self.factors:
            w = w * permutation_braid(f)
        return w

    def is_left_weighted(self) -> bool:
        imgs = [f.images for f in self.factors]
        return all(_start_set(b) <= _finish_set(a) for a, b in zip(imgs, imgs[1:]))

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta_exp,
            "factors": [f.one_line() for f in self.factors],
        }


class _NFBuilder:
    """Mutable left normal form, extended one simple factor at a time."""

    def __init__(self, n: int):
        self.n = n
        self.k = 0
        self.factors: list[tuple[int, ...]] = []
        self.e = tuple(range(n))
        self.d = tuple(reversed(range(n)))

    def push(self, s: tuple[int, ...]) -> None:
        f = self.factors
        f.append(s)
        t = len(f) - 2
        while t >= 0:
            a, b = _left_weight(f[t], f[t + 1])
            if a == f[t]:
                break
            f[t], f[t + 1] = a, b
            t -= 1
        lead = 0
        while lead < len(f) and f[lead] == self.d:
            lead += 1
        if lead:
            # Delta A = tau(A) Delta, so leading Deltas already sit in front
            self.k += lead
            del f[:lead]
        while f and f[-1] == self.e:
            f.pop()

    def push_letter(self, i: int, sign: int) -> None:
        if sign > 0:
            self.push(_generator(self.n, i - 1))
        else:
            self.k -= 1
            self.factors = [_tau(a) for a in self.factors]
            self.push(_delta_over_generator(self.n, i - 1))

    def result(self) -> GarsideNormalForm:
        return GarsideNormalForm(self.n, self.k, tuple(Permutation(a) for a in self.factors))


def normal_form(w: BraidWord) -> GarsideNormalForm:
    if w.n == 1:
        return GarsideNormalForm(1, 0, ())
    nf = _NFBuilder(w.n)
    for i, s in w.letters:
        nf.push_letter(i, s)
    return nf.result()


def _check_same_n(u: BraidWord, v: BraidWord) -> None:
    if u.n != v.n:
        raise BraidError(f"strand counts differ: {u.n} vs {v.n}")


def equal(u: BraidWord, v: BraidWord) -> bool:
    _check_same_n(u, v)
    return normal_form(u) == normal_form(v)


def is_trivial(w: BraidWord) -> bool:
    nf = normal_form(w)
    return nf.delta_exp == 0 and not nf.factors


# ---------------------------------------------------------------------------
# Artin action on the free group (independent equality oracle)


def _concat(u: list[int], v: list[int]) -> list[int]:
    out = list(u)
    k = 0
    while k < len(v) and out and out[-1] == -v[k]:
        out.pop()
        k += 1
    out.extend(v[k:])
    return out


def _inv(u: list[int]) -> list[int]:
    return [-x for x in reversed(u)]


def artin_images(w: BraidWord) -> tuple[tuple[int, ...], ...]:
    """Images of the free generators ``x_1..x_n`` (as signed ints)."""
    imgs = [[j + 1] for j in range(w.n)]
    for i, s in w.letters:
        a, b = imgs[i - 1], imgs[i]
        if s > 0:
            imgs[i - 1] = _concat(_concat(a, b), _inv(a))
            imgs[i] = a
        else:
            imgs[i - 1] = b
            imgs[i] = _concat(_concat(_inv(b), a), b)
    return tuple(tuple(x) for x in imgs)


def artin_equal(u: BraidWord, v: BraidWord) -> bool:
    _check_same_n(u, v)
    return artin_images(u) == artin_images(v)


# ---------------------------------------------------------------------------
# cabling, strand deletion, parabolic membership


def _block_crossing(start: int, a: int, b: int, n: int) -> list[tuple[int, int]]:
    """Positive crossing of a width-``a`` block (at 0-based ``start``) over the
    width-``b`` block to its right."""
    letters = []
    for r in range(a):
        p = start + a - 1 - r  # 0-based position of the moving strand
        letters.extend((q + 1, 1) for q in range(p, p + b))
    return letters


def permute_widths(widths: Sequence[int], p: Permutation) -> tuple[int, ...]:
    out = [0] * len(widths)
    for j, w in enumerate(widths):
        out[p(j)] = w
    return tuple(out)


def cable(b: BraidWord, widths: Sequence[int]) -> BraidWord:
    """Thicken strand ``j`` (by starting position) of ``b`` into ``widths[j]``
    parallel strands."""
    widths = list(widths)
    if len(widths) != b.n:
        raise BraidError(f"need {b.n} widths, got {len(widths)}")
    if any(int(w) < 1 for w in widths):
        raise BraidError("widths must be positive")
    n = sum(widths)
    cur = list(widths)
    letters: list[tuple[int, int]] = []
    for i, s in b.letters:
        start = sum(cur[: i - 1])
        a, c = cur[i - 1], cur[i]
        if s > 0:
            letters.extend(_block_crossing(start, a, c, n))
        else:
            fwd = _block_crossing(start, c, a, n)
            letters.extend((q, -1) for q, _ in reversed(fwd))
        cur[i - 1], cur[i] = c, a
    return BraidWord(n, tuple(letters))


def forget_strands(w: BraidWord, keep: Iterable[int]) -> BraidWord:
    """Erase every strand whose starting position (1-based) is not in ``keep``."""
    keep = set(keep)
    if not keep or not keep <= set(range(1, w.n + 1)):
        raise BraidError(f"bad strand subset {sorted(keep)}")
    arr = list(range(1, w.n + 1))  # arr[pos] = starting position of the strand there
    letters = []
    for i, s in w.letters:
        x, y = arr[i - 1], arr[i]
        if x in keep and y in keep:
            rank = sum(1 for z in arr[: i - 1] if z in keep)
            letters.append((rank + 1, s))
        arr[i - 1], arr[i] = y, x
    return BraidWord(len(keep), tuple(letters))


def delete_strands(w: BraidWord, keep: Iterable[int]) -> BraidWord:
    keep = set(keep)
    p = permutation_of(w)
    if {p(j - 1) + 1 for j in keep} != keep:
        raise BraidError("keep is not preserved by the braid permutation")
    return forget_strands(w, keep)


def block_product(pieces: Sequence[BraidWord]) -> BraidWord:
    """Juxtapose braids side by side: the block-diagonal embedding."""
    n = sum(p.n for p in pieces)
    letters: list[tuple[int, int]] = []
    offset = 0
    for p in pieces:
        letters.extend((i + offset, s) for i, s in p.letters)
        offset += p.n
    return BraidWord(n, tuple(letters))


def blocks_from_sizes(sizes: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    out = []
    start = 1
    for size in sizes:
        out.append(tuple(range(start, start + size)))
        start += size
    return tuple(out)


def _check_blocks(blocks: Sequence[Sequence[int]], n: int) -> list[int]:
    """Validate consecutive interval blocks; return their sizes."""
    expected = 1
    sizes = []
    for blk in blocks:
        blk = list(blk)
        if not blk or blk != list(range(expected, expected + len(blk))):
            raise BraidError(f"blocks must be consecutive intervals covering 1..{n}")
        expected += len(blk)
        sizes.append(len(blk))
    if expected != n + 1:
        raise BraidError(f"blocks must be consecutive intervals covering 1..{n}")
    return sizes


def _preserves_blocks(a: Sequence[int], label: Sequence[int]) -> bool:
    return all(label[a[j]] == label[j] for j in range(len(a)))


def parabolic_member(w: BraidWord, blocks: Sequence[Sequence[int]]) -> bool:
    """Is ``w`` in the standard parabolic subgroup ``B_{p_1} x ... x B_{p_k}``?

    Positive elements of ``B_n`` lying in the parabolic have every normal form
    factor inside it.  When ``inf(w) = -m < 0`` we first multiply by
    ``Delta_X^m`` (``Delta_X`` the product of the block half twists), which
    makes any member positive without leaving the subgroup.
    """
    sizes = _check_blocks(blocks, w.n)
    label = [b for b, size in enumerate(sizes) for _ in range(size)]
    perm = permutation_of(w)
    if not _preserves_blocks(perm.images, label):
        return False
    nf = normal_form(w)
    if nf.delta_exp < 0:
        delta_x = block_product([delta(size) for size in sizes])
        nf = normal_form(delta_x ** (-nf.delta_exp) * w)
        if nf.delta_exp < 0:
            return False
    if nf.delta_exp > 0 and len(sizes) > 1:
        return False
    return all(_preserves_blocks(f.images, label) for f in nf.factors)


def parabolic_member_oracle(w: BraidWord, blocks: Sequence[Sequence[int]]) -> bool:
    """Membership via strand deletion: project onto each block and compare the
    reassembled block braid with ``w``."""
    _check_blocks(blocks, w.n)
    p = permutation_of(w)
    for blk in blocks:
        if {p(j - 1) + 1 for j in blk} != set(blk):
            return False
    pieces = [delete_strands(w, blk) for blk in blocks]
    return equal(block_product(pieces), w)


def parabolic_member_concrete(w: BraidWord, blocks: Sequence[Iterable[int]]) -> bool:
    """Membership for arbitrary (non-consecutive) blocks: conjugate by the
    positive permutation braid sorting the blocks into consecutive runs."""
    blocks = [sorted(b) for b in blocks]
    order = [j for blk in blocks for j in blk]
    if sorted(order) != list(range(1, w.n + 1)):
        raise BraidError("blocks must partition 1..n")
    images = [0] * w.n
    for pos, j in enumerate(order):
        images[j - 1] = pos
    sort = permutation_braid(Permutation(tuple(images)))
    return parabolic_member(sort.inverse() * w * sort, blocks_from_sizes([len(b) for b in blocks]))


# ---------------------------------------------------------------------------
# sampling


def random_word(rng: random.Random, n: int, length: int) -> BraidWord:
    if n == 1:
        return BraidWord(1)
    return BraidWord(n, tuple((rng.randint(1, n - 1), rng.choice((1, -1))) for _ in range(length)))


def random_block_word(rng: random.Random, sizes: Sequence[int], length: int) -> BraidWord:
    """Random word in the generators internal to consecutive blocks."""
    n = sum(sizes)
    gens = []
    start = 1
    for size in sizes:
        gens.extend(range(start, start + size - 1))
        start += size
    if not gens:
        return BraidWord(n)
    return BraidWord(n, tuple((rng.choice(gens), rng.choice((1, -1))) for _ in range(length)))
