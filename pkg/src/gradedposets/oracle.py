"""Ground truth by exhaustion over labeled posets and bipartite graphs."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import _kernels as K
from .genfun import QuarkFamilyFlags
from .poset import Poset, contains_3plus1, is_strongly_graded, rank_function
from .structure import (
    LegalityMode,
    TrimmedPoset,
    compose_height_two,
    compose_quarks,
    decompose_ordinal,
    height_two_decompose,
    is_legal,
    ordinal_canonical,
    ordinal_sum,
    quark_canonical,
    quark_decompose,
    trim,
    word_of,
)

MAX_N = 7


@lru_cache(maxsize=None)
def poset_table(n: int) -> np.ndarray:
    """All labeled posets on ``n`` elements as rows of ``uint8`` down-masks."""
    if not 0 <= n <= MAX_N:
        raise ValueError(f"n must lie in 0..{MAX_N}, got {n}")
    if n == 0:
        return np.zeros((1, 0), np.uint8)
    return K.extend_level(poset_table(n - 1))


def poset_from_down(row) -> Poset:
    n = len(row)
    up = [0] * n
    for v in range(n):
        d = int(row[v])
        for u in range(n):
            if d >> u & 1:
                up[u] |= 1 << v
    return Poset(n, tuple(up))


def enumerate_posets(n: int, visitor: Callable[[Poset], None] | None = None) -> int:
    """Visit every labeled poset on ``n`` elements once, in a fixed order."""
    table = poset_table(n)
    if visitor is not None:
        for row in table:
            visitor(poset_from_down(row))
    return len(table)


@lru_cache(maxsize=None)
def classify(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-poset flag bits and heights (``-1`` when not weakly graded)."""
    return K.classify_all(poset_table(n))


@dataclass
class OracleReport:
    n: int
    total_posets: int
    weakly_graded: int
    strongly_graded: int
    weak_avoiding: dict[int, int] = field(default_factory=dict)
    strong_avoiding: dict[int, int] = field(default_factory=dict)
    semiorder_strong: dict[int, int] = field(default_factory=dict)
    theorem_disagreements: int = 0

    @property
    def weak_total(self) -> int:
        return sum(self.weak_avoiding.values())

    @property
    def strong_total(self) -> int:
        return sum(self.strong_avoiding.values())

    @property
    def semiorder_total(self) -> int:
        return sum(self.semiorder_strong.values())

    def to_json_obj(self) -> dict:
        def rows(d):
            return [{"n": self.n, "k": k, "count": str(v)} for k, v in sorted(d.items())]

        return {
            "source": "oracle",
            "n": self.n,
            "total_posets": str(self.total_posets),
            "weakly_graded": str(self.weakly_graded),
            "strongly_graded": str(self.strongly_graded),
            "tables": [
                {"kind": "weak_by_height", "counts": rows(self.weak_avoiding)},
                {"kind": "strong_by_height", "counts": rows(self.strong_avoiding)},
                {"kind": "semiorder", "counts": [{"n": self.n, "count": str(self.semiorder_total)}]},
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)


def _tally(mask: np.ndarray, heights: np.ndarray) -> dict[int, int]:
    hs, cnt = np.unique(heights[mask], return_counts=True)
    return {int(h): int(c) for h, c in zip(hs, cnt)}


def brute_counts(n: int) -> OracleReport:
    flags, heights = classify(n)
    graded = (flags & K.GRADED) != 0
    strong = graded & ((flags & K.STRONG) != 0)
    avoid = graded & ((flags & K.HAS_3P1) == 0)
    avoid_strong = avoid & strong
    semi = avoid_strong & ((flags & K.HAS_2P2) == 0)
    vig = (flags & K.VIGILANT) != 0
    cond2 = vig & ((flags & K.FAR_COMPARABLE) != 0)
    cond3 = vig & ((flags & K.NEAR_COMPARABLE) != 0)
    disagree = graded & ((avoid != cond2) | (avoid != cond3))
    return OracleReport(
        n=n,
        total_posets=len(flags),
        weakly_graded=int(graded.sum()),
        strongly_graded=int(strong.sum()),
        weak_avoiding=_tally(avoid, heights),
        strong_avoiding=_tally(avoid_strong, heights),
        semiorder_strong=_tally(semi, heights),
        theorem_disagreements=int(disagree.sum()),
    )


def enumerate_bipartite(m: int, n: int, flags: QuarkFamilyFlags) -> int:
    """Count bipartite graphs on ``m`` bottom and ``n`` top vertices admitted by ``flags``."""
    if m * n > 20:
        raise ValueError("m*n must be at most 20")
    hist = K.bipartite_histogram(m, n)
    total = 0
    for idx, c in enumerate(hist):
        bits = (bool(idx & 8), bool(idx & 4), bool(idx & 2), bool(idx & 1))
        if c and flags.admits(*bits):
            total += int(c)
    return total


# -- structural sweep ------------------------------------------------------------------

class SweepFailure(AssertionError):
    def __init__(self, message: str, poset: Poset):
        super().__init__(f"{message}: n={poset.n} relations={[(a + 1, b + 1) for a, b in poset.relations()]}")
        self.poset = poset


@dataclass
class SweepReport:
    n: int
    checked: int = 0
    strong_checked: int = 0
    rejected_containing: int = 0
    words_checked: int = 0
    failures: int = 0
    word_lengths: Counter = field(default_factory=Counter)


def _part_modes(count: int, strong: bool) -> list[LegalityMode]:
    if strong:
        return [LegalityMode.STRONG] * count
    return [LegalityMode.for_summand(i, count) for i in range(count)]


def _relax(mode: LegalityMode) -> tuple[bool, bool]:
    return (mode in (LegalityMode.WEAK_BOTTOM, LegalityMode.WEAK_BOTH),
            mode in (LegalityMode.WEAK_TOP, LegalityMode.WEAK_BOTH))


def _recompose_part(part: TrimmedPoset, mode: LegalityMode) -> TrimmedPoset:
    if part.height <= 1:
        return part
    if part.height == 2:
        q, bg, tg = height_two_decompose(part)
        return compose_height_two(q, bg, tg)
    rb, rt = _relax(mode)
    quarks, alphas = quark_decompose(part, rb, rt)
    return compose_quarks(quarks[0], alphas, quarks[1:], rb, rt)


def _words_legal(parts: list[TrimmedPoset], modes: list[LegalityMode], report: SweepReport) -> bool:
    ok = True
    for part, mode in zip(parts, modes):
        if part.height < 2:
            continue
        rb, rt = _relax(mode)
        w = word_of(part, rb, rt)
        report.words_checked += 1
        report.word_lengths[len(w)] += 1
        ok = ok and is_legal(w, mode)
    return ok


def check_poset(P: Poset, report: SweepReport) -> None:
    """Round-trip one weakly graded poset; raise :class:`SweepFailure` on a mismatch."""
    R = rank_function(P)
    avoids = not contains_3plus1(P)
    strong = is_strongly_graded(R)
    T = trim(R)
    if contains_3plus1(T.poset) == avoids:
        raise SweepFailure("trimming changed 3+1 containment", P)
    if not T.is_valid():
        raise SweepFailure("trimmed poset violates its invariants", P)
    if not avoids:
        try:
            parts = decompose_ordinal(T)
            modes = _part_modes(len(parts), strong)
            legal = _words_legal(parts, modes, SweepReport(report.n))
        except ValueError:
            report.rejected_containing += 1
            return
        if legal:
            raise SweepFailure("legal words for a poset containing 3+1", P)
        report.rejected_containing += 1
        return

    try:
        parts = decompose_ordinal(T)
    except ValueError as exc:
        raise SweepFailure(f"ordinal decomposition failed ({exc})", P) from exc
    acc = TrimmedPoset.empty()
    for part in parts:
        acc = ordinal_sum(acc, part)
    if acc != ordinal_canonical(T):
        raise SweepFailure("ordinal summands do not recompose", P)

    checks = [(parts, _part_modes(len(parts), False))]
    if strong:
        checks.append((parts, _part_modes(len(parts), True)))
        report.strong_checked += 1
    for ps, modes in checks:
        for part, mode in zip(ps, modes):
            try:
                rebuilt = _recompose_part(part, mode)
            except ValueError as exc:
                raise SweepFailure(f"quark decomposition failed in {mode.value} mode ({exc})", P) from exc
            if rebuilt != quark_canonical(part):
                raise SweepFailure("quarks do not recompose", P)
        try:
            legal = _words_legal(ps, modes, report)
        except ValueError as exc:
            raise SweepFailure(f"word extraction failed ({exc})", P) from exc
        if not legal:
            raise SweepFailure("illegal word for an avoiding poset", P)
    report.checked += 1


def decomposition_sweep(n: int) -> SweepReport:
    """Trim, decompose, recompose and compare words for every weakly graded poset on ``n`` elements.

    Avoiding posets must round-trip with legal words; vigilant posets containing
    3+1 must either fail to decompose or produce an illegal word.
    """
    if not 0 <= n <= 6:
        raise ValueError("decomposition_sweep supports n <= 6")
    table = poset_table(n)
    flags, _ = classify(n)
    report = SweepReport(n)
    todo = np.nonzero(((flags & K.GRADED) != 0) & ((flags & K.VIGILANT) != 0))[0]
    for idx in todo:
        check_poset(poset_from_down(table[idx]), report)
    return report


def duplicate_free(n: int) -> bool:
    """Debug check that insertion enumeration yields distinct posets."""
    table = poset_table(n)
    return len({row.tobytes() for row in table}) == len(table)
