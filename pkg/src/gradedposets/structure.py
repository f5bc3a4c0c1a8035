"""Trimming, ordinal sums, quarks, sticking/gluing and legal words.

A :class:`TrimmedPoset` keeps its unlabeled all-seeing placeholders as
ordinary elements with label 0. Composition operations return one canonical
labeling (left operand first, order preserving); counting the ways labels can
be distributed is the generating functions' job, not this module's.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .poset import Poset, RankedPoset, _bits, contains_3plus1, is_strongly_graded, is_vigilant


@dataclass(frozen=True, eq=False)
class TrimmedPoset:
    ranked: RankedPoset
    labels: tuple[int, ...]

    @classmethod
    def empty(cls) -> "TrimmedPoset":
        return cls(RankedPoset(Poset(0, ()), ()), ())

    @property
    def poset(self) -> Poset:
        return self.ranked.poset

    @property
    def rank(self) -> tuple[int, ...]:
        return self.ranked.rank

    @property
    def size(self) -> int:
        return self.poset.n

    @property
    def height(self) -> int:
        return max(self.rank) + 1 if self.rank else 0

    @property
    def n_labeled(self) -> int:
        return sum(1 for lab in self.labels if lab)

    @property
    def n_unlabeled(self) -> int:
        return sum(1 for lab in self.labels if not lab)

    def _ident(self, v: int):
        lab = self.labels[v]
        return ("L", lab) if lab else ("U", self.rank[v])

    @cached_property
    def key(self):
        ids = [self._ident(v) for v in range(self.size)]
        elems = frozenset((ids[v], self.rank[v]) for v in range(self.size))
        rels = frozenset((ids[a], ids[b]) for a, b in self.poset.relations())
        return elems, rels

    def __eq__(self, other):
        if not isinstance(other, TrimmedPoset):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        lab = ["*" if not x else str(x) for x in self.labels]
        return f"TrimmedPoset(height={self.height}, labels={lab}, rank={list(self.rank)})"

    def is_valid(self) -> bool:
        """Trimmed-poset invariants on the stored ranks and labels."""
        R = self.ranked
        if not is_vigilant(R):
            return False
        per_rank: dict[int, int] = {}
        for v, lab in enumerate(self.labels):
            if lab:
                if R.all_seeing[v]:
                    return False
            else:
                if not R.all_seeing[v]:
                    return False
                per_rank[self.rank[v]] = per_rank.get(self.rank[v], 0) + 1
        if any(c > 1 for c in per_rank.values()):
            return False
        labs = sorted(x for x in self.labels if x)
        return labs == list(range(1, len(labs) + 1))

    def relabeled(self, order: Sequence[int]) -> "TrimmedPoset":
        """Give the labeled elements labels 1..m in the sequence ``order``."""
        new = [0] * self.size
        for i, v in enumerate(order, start=1):
            new[v] = i
        return TrimmedPoset(self.ranked, tuple(new))

    def restricted(self, elements: Sequence[int], rank_shift: int = 0) -> "TrimmedPoset":
        """Sub-poset on ``elements`` with order-preserving relabeling."""
        P = self.poset.induced(elements)
        rank = tuple(self.rank[e] - rank_shift for e in elements)
        labs = [self.labels[e] for e in elements]
        present = sorted(x for x in labs if x)
        remap = {x: i for i, x in enumerate(present, start=1)}
        return TrimmedPoset(RankedPoset(P, rank), tuple(remap[x] if x else 0 for x in labs))


def _build(n: int, rank: Sequence[int], labels: Sequence[int], gens: Sequence[tuple[int, int]]) -> TrimmedPoset:
    up = [0] * n
    for a, b in gens:
        up[a] |= 1 << b
    P = Poset(n, tuple(up)).closure()
    return TrimmedPoset(RankedPoset(P, tuple(rank)), tuple(labels))


# -- trimming -----------------------------------------------------------------

def trim(R: RankedPoset) -> TrimmedPoset:
    """Collapse the all-seeing elements of each rank into one unlabeled placeholder."""
    if not is_vigilant(R):
        raise ValueError("trim requires a vigilant poset")
    keep = []
    placeholder_at: set[int] = set()
    for v in range(R.n):
        if R.all_seeing[v]:
            r = R.rank[v]
            if r in placeholder_at:
                continue
            placeholder_at.add(r)
        keep.append(v)
    P = R.poset.induced(keep)
    rank = tuple(R.rank[v] for v in keep)
    labels = []
    nxt = 1
    for v in keep:
        if R.all_seeing[v]:
            labels.append(0)
        else:
            labels.append(nxt)
            nxt += 1
    return TrimmedPoset(RankedPoset(P, rank), tuple(labels))


def avoidance_with_trim(R: RankedPoset) -> tuple[bool, bool]:
    """(avoids 3+1, trimmed version avoids 3+1); the two always agree."""
    return not contains_3plus1(R.poset), not contains_3plus1(trim(R).poset)


# -- ordinal sums ---------------------------------------------------------------

def ordinal_sum(T1: TrimmedPoset, T2: TrimmedPoset) -> TrimmedPoset:
    """Stack ``T2`` on ``T1``: every element of ``T1`` lies below every element of ``T2``."""
    if T1.size == 0:
        return T2
    if T2.size == 0:
        return T1
    n1, n2 = T1.size, T2.size
    h1, m1 = T1.height, T1.n_labeled
    all2 = ((1 << n2) - 1) << n1
    up = [T1.poset.up[v] | all2 for v in range(n1)]
    up += [T2.poset.up[v] << n1 for v in range(n2)]
    rank = T1.rank + tuple(r + h1 for r in T2.rank)
    labels = T1.labels + tuple(x + m1 if x else 0 for x in T2.labels)
    return TrimmedPoset(RankedPoset(Poset(n1 + n2, tuple(up)), rank), labels)


def ordinal_cut_ranks(T: TrimmedPoset) -> list[int]:
    """Ranks ``i`` after which the maximal ordinal-sum factorization cuts.

    A cut follows rank ``i < height-1`` when that whole rank set is up-seeing.
    """
    R = T.ranked
    k = T.height
    cuts = []
    for i in range(k - 1):
        if all(R.up_seeing[v] for v in _bits(R.level(i))):
            cuts.append(i)
    return cuts


def is_sum_indecomposable(T: TrimmedPoset, require_strong: bool = True) -> bool:
    if T.size == 0 or not T.is_valid():
        return False
    if require_strong and not is_strongly_graded(T.ranked):
        return False
    return not ordinal_cut_ranks(T)


def decompose_ordinal(T: TrimmedPoset) -> list[TrimmedPoset]:
    """Unique maximal factorization into ordinal summands, bottom first.

    Raises ``ValueError`` when a cut rank does not actually separate the poset
    into an ordinal sum (possible only for weakly graded posets containing 3+1).
    """
    if T.size == 0:
        return []
    bounds = [-1] + ordinal_cut_ranks(T) + [T.height - 1]
    parts = []
    for lo, hi in zip(bounds, bounds[1:]):
        elems = [v for v in range(T.size) if lo < T.rank[v] <= hi]
        parts.append(T.restricted(elems, rank_shift=lo + 1))
    up = T.poset.up
    for cut in bounds[1:-1]:
        below = [v for v in range(T.size) if T.rank[v] <= cut]
        above = sum(1 << v for v in range(T.size) if T.rank[v] > cut)
        if any(above & ~up[v] for v in below):
            raise ValueError(f"rank {cut} is all up-seeing but does not split an ordinal sum")
    return parts


def ordinal_canonical(T: TrimmedPoset) -> TrimmedPoset:
    """``T`` relabeled so that labels run through its ordinal summands bottom first."""
    bounds = ordinal_cut_ranks(T) + [T.height - 1]

    def part(v):
        return next(j for j, hi in enumerate(bounds) if T.rank[v] <= hi)

    order = sorted((v for v in range(T.size) if T.labels[v]), key=lambda v: (part(v), T.labels[v]))
    return T.relabeled(order)


# -- quarks -----------------------------------------------------------------------

@dataclass(frozen=True)
class Quark:
    """Bipartite graph between ``m`` bottom and ``n`` top vertices.

    ``adj[a]`` is the bitmask of top vertices adjacent to bottom vertex ``a``.
    """

    m: int
    n: int
    adj: tuple[int, ...]

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]]) -> "Quark":
        m = len(rows)
        n = len(rows[0]) if m else 0
        adj = tuple(sum(1 << b for b in range(n) if rows[a][b]) for a in range(m))
        return cls(m, n, adj)

    @property
    def full_top(self) -> int:
        return (1 << self.n) - 1

    def column(self, b: int) -> int:
        return sum(1 << a for a in range(self.m) if self.adj[a] >> b & 1)

    def bottom_all_seeing(self) -> list[int]:
        return [a for a in range(self.m) if self.adj[a] == self.full_top]

    def top_all_seeing(self) -> list[int]:
        full = (1 << self.m) - 1
        return [b for b in range(self.n) if self.column(b) == full]

    def bottom_isolated(self) -> list[int]:
        return [a for a in range(self.m) if self.adj[a] == 0]

    def top_isolated(self) -> list[int]:
        return [b for b in range(self.n) if self.column(b) == 0]

    def is_valid(self) -> bool:
        return self.m >= 1 and self.n >= 1 and not (self.bottom_all_seeing() and self.top_all_seeing())

    def is_middle(self) -> bool:
        return self.is_valid() and not self.bottom_all_seeing() and not self.top_all_seeing()

    def is_bottom(self) -> bool:
        return (self.is_valid() and len(self.bottom_all_seeing()) <= 1
                and not self.top_all_seeing() and not self.top_isolated())

    def is_top(self) -> bool:
        return (self.is_valid() and len(self.top_all_seeing()) <= 1
                and not self.bottom_all_seeing() and not self.bottom_isolated())

    def sub(self, bottoms: Sequence[int], tops: Sequence[int]) -> "Quark":
        adj = []
        for a in bottoms:
            row = 0
            for j, b in enumerate(tops):
                if self.adj[a] >> b & 1:
                    row |= 1 << j
            adj.append(row)
        return Quark(len(bottoms), len(tops), tuple(adj))

    def canonical(self) -> "Quark":
        """All-seeing vertices moved to the end of their side, others in order."""
        ab, at = set(self.bottom_all_seeing()), set(self.top_all_seeing())
        bottoms = [a for a in range(self.m) if a not in ab] + sorted(ab)
        tops = [b for b in range(self.n) if b not in at] + sorted(at)
        return self.sub(bottoms, tops)

    def stripped(self) -> "Quark":
        ab, at = set(self.bottom_all_seeing()), set(self.top_all_seeing())
        return self.sub([a for a in range(self.m) if a not in ab], [b for b in range(self.n) if b not in at])


class QuarkRole(enum.Enum):
    BOTTOM = "bottom"
    MIDDLE = "middle"
    TOP = "top"


def quark_roles(q: Quark) -> set[QuarkRole]:
    roles = set()
    if q.is_bottom():
        roles.add(QuarkRole.BOTTOM)
    if q.is_middle():
        roles.add(QuarkRole.MIDDLE)
    if q.is_top():
        roles.add(QuarkRole.TOP)
    return roles


class BType(enum.Enum):
    """Middle-quark type; first symbol is the top rank, second the bottom rank.

    ``o`` means the rank has an isolated vertex, ``x`` that it has none.
    """

    OO = 0
    OX = 1
    XO = 2
    XX = 3

    @property
    def top_isolated(self) -> bool:
        return self in (BType.OO, BType.OX)

    @property
    def bottom_isolated(self) -> bool:
        return self in (BType.OO, BType.XO)

    @classmethod
    def of(cls, top_isolated: bool, bottom_isolated: bool) -> "BType":
        return cls(2 * (not top_isolated) + (not bottom_isolated))

    def __str__(self):
        sym = {True: "∘", False: "⊗"}
        return f"B{sym[self.top_isolated]}{sym[self.bottom_isolated]}"


def quark_type(q: Quark) -> BType:
    if not q.is_valid():
        raise ValueError("not a quark")
    s = q.stripped()
    if s.m == 0 or s.n == 0:
        raise ValueError("quark is empty on one side once all-seeing vertices are removed")
    return BType.of(bool(s.top_isolated()), bool(s.bottom_isolated()))


# -- sticking and gluing ------------------------------------------------------------

def _check_alpha(a: str) -> str:
    if a not in ("S", "G"):
        raise ValueError(f"joining symbol must be 'S' or 'G', got {a!r}")
    return a


def compose_quarks(q0: Quark, alphas: Sequence[str], qs: Sequence[Quark],
                   relax_bottom: bool = False, relax_top: bool = False) -> TrimmedPoset:
    """Stick (``S``) or glue (``G``) a bottom quark, middle quarks and a top quark.

    ``relax_bottom``/``relax_top`` admit a middle quark at the respective end,
    as happens in the outermost summands of weakly graded posets.
    """
    quarks = [q0, *qs]
    k = len(qs)
    if k < 1 or len(alphas) != k:
        raise ValueError("need at least two quarks and one joining symbol per junction")
    alphas = [_check_alpha(a) for a in alphas]
    first, last = quarks[0], quarks[-1]
    if not (first.is_bottom() or (relax_bottom and first.is_middle())):
        raise ValueError("first quark is not a bottom quark")
    if not (last.is_top() or (relax_top and last.is_middle())):
        raise ValueError("last quark is not a top quark")
    for q in quarks[1:-1]:
        if not q.is_middle():
            raise ValueError("interior quark is not a middle quark")

    n_el = 0
    rank: list[int] = []
    labels: list[int] = []
    bottom_ids: list[list[int]] = []
    top_ids: list[list[int]] = []
    placeholders: dict[int, int] = {}
    for q in quarks:
        bottom_ids.append(list(range(n_el, n_el + q.m)))
        n_el += q.m
        top_ids.append(list(range(n_el, n_el + q.n)))
        n_el += q.n
    rank = [0] * n_el
    for i, q in enumerate(quarks):
        for v in bottom_ids[i]:
            rank[v] = i
        for v in top_ids[i]:
            rank[v] = i + 1
    for i, a in enumerate(alphas, start=1):
        if a == "G":
            placeholders[i] = n_el
            rank.append(i)
            n_el += 1

    unlabeled = {bottom_ids[0][a] for a in first.bottom_all_seeing()}
    unlabeled |= {top_ids[-1][b] for b in last.top_all_seeing()}
    labels = [0] * n_el
    nxt = 1
    for i in range(len(quarks)):
        for v in bottom_ids[i] + top_ids[i]:
            if v not in unlabeled:
                labels[v] = nxt
                nxt += 1

    gens: list[tuple[int, int]] = []
    for i, q in enumerate(quarks):
        for a in range(q.m):
            for b in _bits(q.adj[a]):
                gens.append((bottom_ids[i][a], top_ids[i][b]))
    for i in range(k):
        for v in bottom_ids[i]:
            gens += [(v, w) for w in bottom_ids[i + 1]]
        for v in top_ids[i]:
            gens += [(v, w) for w in top_ids[i + 1]]
    for i in range(k - 1):
        for v in top_ids[i]:
            gens += [(v, w) for w in bottom_ids[i + 2]]
    for r, p in placeholders.items():
        gens += [(v, p) for v in range(n_el) if rank[v] == r - 1]
        gens += [(p, w) for w in range(n_el) if rank[w] == r + 1]
    return _build(n_el, rank, labels, gens)


def compose_height_two(q: Quark, bottom_glued: bool, top_glued: bool) -> TrimmedPoset:
    """Height-2 sum-indecomposable from a middle quark plus optional placeholders."""
    if not q.is_middle():
        raise ValueError("height-2 construction needs a middle quark")
    n_el = q.m + q.n
    rank = [0] * q.m + [1] * q.n
    labels = list(range(1, n_el + 1))
    gens = [(a, q.m + b) for a in range(q.m) for b in _bits(q.adj[a])]
    if bottom_glued:
        p = n_el
        n_el += 1
        rank.append(0)
        labels.append(0)
        gens += [(p, q.m + b) for b in range(q.n)]
    if top_glued:
        p = n_el
        n_el += 1
        rank.append(1)
        labels.append(0)
        gens += [(a, p) for a in range(q.m)]
        if bottom_glued:
            gens.append((n_el - 2, p))
    return _build(n_el, rank, labels, gens)


def height_two_decompose(T: TrimmedPoset) -> tuple[Quark, bool, bool]:
    """Inverse of :func:`compose_height_two`, verified by recomposition."""
    if T.height != 2:
        raise ValueError("expected height 2")
    R = T.ranked
    low = [v for v in _bits(R.level(0)) if T.labels[v]]
    high = [v for v in _bits(R.level(1)) if T.labels[v]]
    low.sort(key=lambda v: T.labels[v])
    high.sort(key=lambda v: T.labels[v])
    up = T.poset.up
    q = Quark(len(low), len(high),
              tuple(sum(1 << j for j, w in enumerate(high) if up[v] >> w & 1) for v in low))
    glued = {T.rank[v] for v in range(T.size) if not T.labels[v]}
    b_glued, t_glued = 0 in glued, 1 in glued
    if compose_height_two(q, b_glued, t_glued) != T.relabeled(low + high):
        raise ValueError("height-2 poset is not a quark with placeholders")
    return q, b_glued, t_glued


def _quark_parts(T: TrimmedPoset):
    """Element lists (bottom, top) of each quark and the joining symbols."""
    R = T.ranked
    k = T.height - 2
    placeholder = {T.rank[v]: v for v in range(T.size) if not T.labels[v]}

    def by_label(vs):
        return sorted(vs, key=lambda v: (T.labels[v] == 0, T.labels[v]))

    parts = []
    for i in range(k + 1):
        low = [v for v in _bits(R.level(i)) if i == 0 or not R.up_seeing[v]]
        high = [v for v in _bits(R.level(i + 1)) if i == k or not R.down_seeing[v]]
        parts.append((by_label(low), by_label(high)))
    alphas = tuple("G" if i in placeholder else "S" for i in range(1, k + 1))
    return parts, alphas


def quark_decompose(T: TrimmedPoset, relax_bottom: bool = False,
                    relax_top: bool = False) -> tuple[list[Quark], tuple[str, ...]]:
    """Unique bottom/middle/top quark factorization of a sum-indecomposable poset.

    The result is verified by recomposition; a mismatch raises ``ValueError``.
    """
    if T.height < 3:
        raise ValueError("quark decomposition needs height at least 3")
    parts, alphas = _quark_parts(T)
    up = T.poset.up
    quarks = []
    for low, high in parts:
        if not low or not high:
            raise ValueError("empty quark side; poset is not sum-indecomposable")
        adj = []
        for v in low:
            row = 0
            for j, w in enumerate(high):
                if up[v] >> w & 1:
                    row |= 1 << j
            adj.append(row)
        quarks.append(Quark(len(low), len(high), tuple(adj)))
    composed = compose_quarks(quarks[0], alphas, quarks[1:], relax_bottom, relax_top)
    order = [v for low, high in parts for v in low + high if T.labels[v]]
    if composed != T.relabeled(order):
        raise ValueError("poset is not a sticking/gluing of its quarks")
    return quarks, alphas


def quark_canonical(T: TrimmedPoset) -> TrimmedPoset:
    """``T`` relabeled in quark order (the labeling produced by composition)."""
    parts, _ = _quark_parts(T)
    return T.relabeled([v for low, high in parts for v in low + high if T.labels[v]])


# -- words ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    """``alphas[0] types[0] alphas[1] ... types[k] alphas[k+1]``."""

    alphas: tuple[str, ...]
    types: tuple[BType, ...]

    def __post_init__(self):
        if len(self.types) < 1 or len(self.alphas) != len(self.types) + 1:
            raise ValueError("malformed word")
        for a in self.alphas:
            _check_alpha(a)

    def __len__(self):
        return len(self.alphas) + len(self.types)

    def __str__(self):
        out = [self.alphas[0]]
        for b, a in zip(self.types, self.alphas[1:]):
            out += [str(b), a]
        return " ".join(out)

    @classmethod
    def parse(cls, text: str) -> "Word":
        names = {str(b): b for b in BType}
        toks = text.split()
        return cls(tuple(toks[0::2]), tuple(names[t] for t in toks[1::2]))


class LegalityMode(enum.Enum):
    STRONG = "strong"
    WEAK_INTERIOR = "weak-interior"
    WEAK_TOP = "weak-top"
    WEAK_BOTTOM = "weak-bottom"
    WEAK_BOTH = "weak-both"

    @classmethod
    def for_summand(cls, index: int, count: int) -> "LegalityMode":
        """Mode for summand ``index`` of ``count`` in a weakly graded poset."""
        bottom, top = index == 0, index == count - 1
        if bottom and top:
            return cls.WEAK_BOTH
        if bottom:
            return cls.WEAK_BOTTOM
        if top:
            return cls.WEAK_TOP
        return cls.WEAK_INTERIOR


def is_legal(w: Word, mode: LegalityMode = LegalityMode.STRONG) -> bool:
    check_start = mode not in (LegalityMode.WEAK_BOTTOM, LegalityMode.WEAK_BOTH)
    check_end = mode not in (LegalityMode.WEAK_TOP, LegalityMode.WEAK_BOTH)
    if check_start and w.alphas[0] == "S" and w.types[0].top_isolated:
        return False
    if check_end and w.alphas[-1] == "S" and w.types[-1].bottom_isolated:
        return False
    for i in range(1, len(w.types)):
        if w.types[i - 1].bottom_isolated and w.alphas[i] == "S" and w.types[i].top_isolated:
            return False
    return True


def word_of(T: TrimmedPoset, relax_bottom: bool = False, relax_top: bool = False) -> Word:
    """Word of a sum-indecomposable trimmed poset of height at least 2."""
    h = T.height
    if h < 2:
        raise ValueError("words are defined for height at least 2")
    glued = {T.rank[v] for v in range(T.size) if not T.labels[v]}
    first = "G" if 0 in glued else "S"
    last = "G" if h - 1 in glued else "S"
    if h == 2:
        q, _, _ = height_two_decompose(T)
        return Word((first, last), (quark_type(q),))
    quarks, alphas = quark_decompose(T, relax_bottom, relax_top)
    return Word((first, *alphas, last), tuple(quark_type(q) for q in quarks))


def avoids_via_word(T: TrimmedPoset, mode: LegalityMode = LegalityMode.STRONG) -> bool:
    if T.height <= 1:
        return True
    relax_b = mode in (LegalityMode.WEAK_BOTTOM, LegalityMode.WEAK_BOTH)
    relax_t = mode in (LegalityMode.WEAK_TOP, LegalityMode.WEAK_BOTH)
    return is_legal(word_of(T, relax_b, relax_t), mode)
