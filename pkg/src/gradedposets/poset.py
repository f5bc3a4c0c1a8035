"""Finite labeled posets: gradedness, rank sets, seeing classes, (3+1)-avoidance.

Elements are stored as indices ``0..n-1``; the user-facing labels are ``1..n``.
The order is kept as bitmasks: ``up[a]`` has bit ``b`` set iff ``a < b``.
Small posets (n <= 7 everywhere in this package) make plain Python ints the
fastest representation; :attr:`Poset.lt` materializes the boolean matrix.
"""
from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Poset:
    """A strict order on ``n`` elements, stored as upward bitmasks."""

    n: int
    up: tuple[int, ...]

    @classmethod
    def from_matrix(cls, lt) -> "Poset":
        lt = np.asarray(lt, dtype=bool)
        if lt.ndim != 2 or lt.shape[0] != lt.shape[1]:
            raise ValueError(f"relation matrix must be square, got shape {lt.shape}")
        n = lt.shape[0]
        up = tuple(sum(1 << b for b in range(n) if lt[a, b]) for a in range(n))
        return cls(n, up)

    @classmethod
    def from_relations(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Poset":
        """Build from 1-based pairs ``(a, b)`` meaning ``a < b``, closing transitively.

        Raises ``ValueError`` when the closure is not a strict order.
        """
        up = [0] * n
        for a, b in pairs:
            if not (1 <= a <= n and 1 <= b <= n):
                raise ValueError(f"pair {(a, b)} out of range 1..{n}")
            up[a - 1] |= 1 << (b - 1)
        P = cls(n, tuple(up)).closure()
        if not validate(P):
            raise ValueError("relations do not define a strict partial order")
        return P

    @classmethod
    def chain(cls, n: int) -> "Poset":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~((1 << (a + 1)) - 1) for a in range(n)))

    @classmethod
    def antichain(cls, n: int) -> "Poset":
        return cls(n, (0,) * n)

    def closure(self) -> "Poset":
        up = list(self.up)
        # Warshall on bitmasks
        for k in range(self.n):
            bit = 1 << k
            for a in range(self.n):
                if up[a] & bit:
                    up[a] |= up[k]
        return Poset(self.n, tuple(up))

    @cached_property
    def down(self) -> tuple[int, ...]:
        down = [0] * self.n
        for a in range(self.n):
            for b in _bits(self.up[a]):
                down[b] |= 1 << a
        return tuple(down)

    @cached_property
    def comparable(self) -> tuple[int, ...]:
        """``comparable[a]`` includes ``a`` itself."""
        return tuple(self.up[a] | self.down[a] | (1 << a) for a in range(self.n))

    @property
    def lt(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        for a in range(self.n):
            for b in _bits(self.up[a]):
                m[a, b] = True
        return m

    def less(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)

    def relations(self) -> list[tuple[int, int]]:
        """All 0-based pairs ``(a, b)`` with ``a < b``."""
        return [(a, b) for a in range(self.n) for b in _bits(self.up[a])]

    def induced(self, elements: Sequence[int]) -> "Poset":
        """Restriction to ``elements``; element ``elements[i]`` becomes ``i``."""
        pos = {e: i for i, e in enumerate(elements)}
        up = []
        for e in elements:
            mask = 0
            for b in _bits(self.up[e]):
                if b in pos:
                    mask |= 1 << pos[b]
            up.append(mask)
        return Poset(len(elements), tuple(up))

    @cached_property
    def cover_up(self) -> tuple[int, ...]:
        res = []
        for a in range(self.n):
            above = self.up[a]
            implied = 0
            for c in _bits(above):
                implied |= self.up[c]
            res.append(above & ~implied)
        return tuple(res)


def validate(P) -> bool:
    """True iff the relation (a :class:`Poset` or a square matrix) is a strict order."""
    if not isinstance(P, Poset):
        lt = np.asarray(P, dtype=bool)
        if lt.ndim != 2 or lt.shape[0] != lt.shape[1]:
            return False
        P = Poset.from_matrix(lt)
    for a in range(P.n):
        if P.up[a] >> a & 1:
            return False
        for b in _bits(P.up[a]):
            if P.up[b] >> a & 1:
                return False
            if P.up[b] & ~P.up[a]:
                return False
    return True


def covers(P: Poset) -> np.ndarray:
    """Boolean matrix with ``(a, b)`` set iff ``b`` covers ``a``."""
    m = np.zeros((P.n, P.n), dtype=bool)
    for a in range(P.n):
        for b in _bits(P.cover_up[a]):
            m[a, b] = True
    return m


def contains_3plus1(P: Poset) -> bool:
    full = (1 << P.n) - 1
    comp = P.comparable
    for x in range(P.n):
        for y in _bits(P.up[x]):
            for z in _bits(P.up[y]):
                if full & ~(comp[x] | comp[y] | comp[z]):
                    return True
    return False


def contains_2plus2(P: Poset) -> bool:
    comp = P.comparable
    pairs = P.relations()
    for a, b in pairs:
        blocked = comp[a] | comp[b]
        for c, d in pairs:
            if not (blocked >> c & 1) and not (blocked >> d & 1):
                return True
    return False


@dataclass(frozen=True)
class RankedPoset:
    """A poset with an explicit rank per element.

    Values returned by :func:`rank_function` satisfy both gradedness axioms.
    Pieces cut out of larger posets by the structure module may keep
    inherited ranks whose component minimum is not 0.
    """

    poset: Poset
    rank: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.poset.n

    @cached_property
    def levels(self) -> tuple[int, ...]:
        """Bitmask of the rank set for each rank ``0..max``."""
        if not self.rank:
            return ()
        lv = [0] * (max(self.rank) + 1)
        for v, r in enumerate(self.rank):
            lv[r] |= 1 << v
        return tuple(lv)

    def level(self, r: int) -> int:
        return self.levels[r] if 0 <= r < len(self.levels) else 0

    @cached_property
    def up_seeing(self) -> tuple[bool, ...]:
        up = self.poset.up
        return tuple(self.level(r + 1) & ~up[v] == 0 for v, r in enumerate(self.rank))

    @cached_property
    def down_seeing(self) -> tuple[bool, ...]:
        down = self.poset.down
        return tuple(self.level(r - 1) & ~down[v] == 0 for v, r in enumerate(self.rank))

    @cached_property
    def all_seeing(self) -> tuple[bool, ...]:
        return tuple(u and d for u, d in zip(self.up_seeing, self.down_seeing))


def is_valid_ranking(R: RankedPoset) -> bool:
    """Check both rank axioms directly (cover steps of +1, component minimum 0)."""
    P = R.poset
    for a in range(P.n):
        for b in _bits(P.cover_up[a]):
            if R.rank[b] - R.rank[a] != 1:
                return False
    for comp in components(P):
        if min(R.rank[v] for v in comp) != 0:
            return False
    return True


def components(P: Poset) -> list[list[int]]:
    """Connected components of the comparability graph, in order of least element."""
    seen = 0
    out = []
    for s in range(P.n):
        if seen >> s & 1:
            continue
        comp = 1 << s
        frontier = comp
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= P.comparable[v]
            frontier = nxt & ~comp
            comp |= nxt
        seen |= comp
        out.append(list(_bits(comp)))
    return out


def rank_function(P: Poset) -> RankedPoset | None:
    """The rank function of a weakly graded poset, or ``None`` if there is none.

    Ranks propagate along cover edges (+1 upward, -1 downward) per component
    and each component is shifted so that its minimum is 0; a conflicting
    assignment means the poset is not weakly graded.
    """
    rank: list[int | None] = [None] * P.n
    cu = P.cover_up
    cd = [0] * P.n
    for a in range(P.n):
        for b in _bits(cu[a]):
            cd[b] |= 1 << a
    for s in range(P.n):
        if rank[s] is not None:
            continue
        rank[s] = 0
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w, step in [(w, 1) for w in _bits(cu[v])] + [(w, -1) for w in _bits(cd[v])]:
                want = rank[v] + step
                if rank[w] is None:
                    rank[w] = want
                    comp.append(w)
                    queue.append(w)
                elif rank[w] != want:
                    return None
        low = min(rank[v] for v in comp)
        for v in comp:
            rank[v] -= low
    return RankedPoset(P, tuple(rank))


def is_strongly_graded(R: RankedPoset) -> bool:
    P = R.poset
    mins = {R.rank[v] for v in range(P.n) if P.down[v] == 0}
    maxs = {R.rank[v] for v in range(P.n) if P.up[v] == 0}
    return len(mins) <= 1 and len(maxs) <= 1


def height(R: RankedPoset) -> int:
    return max(R.rank) + 1 if R.rank else 0


class SeeingClass(enum.Enum):
    UP = "up-seeing"
    DOWN = "down-seeing"
    ALL = "all-seeing"
    NONE = "none-seeing"


def seeing_class(R: RankedPoset, v: int) -> SeeingClass:
    up, down = R.up_seeing[v], R.down_seeing[v]
    if up and down:
        return SeeingClass.ALL
    if up:
        return SeeingClass.UP
    if down:
        return SeeingClass.DOWN
    return SeeingClass.NONE


def is_vigilant(R: RankedPoset) -> bool:
    return all(u or d for u, d in zip(R.up_seeing, R.down_seeing))


def _far_pairs_comparable(R: RankedPoset, exact: bool) -> bool:
    comp = R.poset.comparable
    lv = R.levels
    for v, r in enumerate(R.rank):
        if exact:
            others = R.level(r + 2)
        else:
            others = 0
            for s in range(r + 2, len(lv)):
                others |= lv[s]
        if others & ~comp[v]:
            return False
    return True


def local_avoidance_check(R: RankedPoset) -> bool:
    """Vigilant, and every two elements two ranks apart are comparable."""
    return is_vigilant(R) and _far_pairs_comparable(R, exact=True)


def far_comparability_check(R: RankedPoset) -> bool:
    """Vigilant, and every two elements at least two ranks apart are comparable."""
    return is_vigilant(R) and _far_pairs_comparable(R, exact=False)


def to_dot(R: RankedPoset, labels: Sequence[int | None] | None = None, name: str = "P") -> str:
    """Hasse diagram as a DOT digraph, one ``rank=same`` group per rank set.

    ``labels[v]`` of ``None`` or 0 marks an unlabeled (all-seeing) placeholder.
    """
    P = R.poset
    if labels is None:
        labels = list(range(1, P.n + 1))

    def node(v: int) -> str:
        return f"v{v}"

    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for r, mask in enumerate(R.levels):
        members = list(_bits(mask))
        if not members:
            continue
        lines.append(f"  {{ rank=same; {' '.join(node(v) for v in members)}; }}")
    for v in range(P.n):
        lab = labels[v]
        if lab:
            lines.append(f'  {node(v)} [label="{lab}"];')
        else:
            lines.append(f'  {node(v)} [label="", shape=box];')
    for a in range(P.n):
        for b in _bits(P.cover_up[a]):
            lines.append(f"  {node(a)} -> {node(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_exchange(text: str) -> Poset:
    """Parse ``{"n": ..., "relations": [[a, b], ...]}`` (1-based, ``a < b``)."""
    try:
        obj = json.loads(text)
        n = obj["n"]
        pairs = obj.get("relations", [])
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed poset document: {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError("field n must be a nonnegative integer")
    if not isinstance(pairs, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(x, int) for x in p) for p in pairs):
        raise ValueError("relations must be a list of [a, b] integer pairs")
    return Poset.from_relations(n, pairs)


def dump_exchange(P: Poset) -> str:
    """Inverse of :func:`load_exchange`, listing cover pairs only."""
    pairs = [[a + 1, b + 1] for a in range(P.n) for b in _bits(P.cover_up[a])]
    return json.dumps({"n": P.n, "relations": pairs})
