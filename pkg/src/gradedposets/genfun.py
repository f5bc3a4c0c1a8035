"""Counting formulas: quark families, F-series, transfer-matrix pipelines, closed forms."""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import comb
from typing import Iterator

from .series import (
    SeriesMatrix,
    TruncatedSeries,
    egf_count,
    exp_x,
    invert,
    neumann_apply,
    psi,
    subst_t_one,
    subst_z,
)
from .structure import BType, LegalityMode, Word, is_legal

DEFAULT_NX = 16
BTYPES = tuple(BType)


# -- quark families ----------------------------------------------------------------

class Flag(enum.Enum):
    REQUIRED = "required"
    FORBIDDEN = "forbidden"
    FREE = "free"

    def admits(self, present: bool) -> bool:
        if self is Flag.FREE:
            return True
        return present == (self is Flag.REQUIRED)


R, X, F_ = Flag.REQUIRED, Flag.FORBIDDEN, Flag.FREE


@dataclass(frozen=True)
class QuarkFamilyFlags:
    """Restrictions on a bipartite graph between ``m`` bottom and ``n`` top vertices.

    Each field says whether that side must, must not, or may contain an
    all-seeing (resp. isolated) vertex.
    """

    bottom_all_seeing: Flag = Flag.FREE
    bottom_isolated: Flag = Flag.FREE
    top_all_seeing: Flag = Flag.FREE
    top_isolated: Flag = Flag.FREE

    def as_tuple(self) -> tuple[Flag, Flag, Flag, Flag]:
        return (self.bottom_all_seeing, self.bottom_isolated, self.top_all_seeing, self.top_isolated)

    def mirrored(self) -> "QuarkFamilyFlags":
        """Swap the roles of the two sides."""
        return QuarkFamilyFlags(self.top_all_seeing, self.top_isolated,
                                self.bottom_all_seeing, self.bottom_isolated)

    def complemented(self) -> "QuarkFamilyFlags":
        """Flags of the edge-complemented family (all-seeing and isolated trade places)."""
        return QuarkFamilyFlags(self.bottom_isolated, self.bottom_all_seeing,
                                self.top_isolated, self.top_all_seeing)

    def admits(self, b_all: bool, b_iso: bool, t_all: bool, t_iso: bool) -> bool:
        return all(f.admits(p) for f, p in zip(self.as_tuple(), (b_all, b_iso, t_all, t_iso)))

    @classmethod
    def of_btype(cls, b: BType) -> "QuarkFamilyFlags":
        """Middle quarks without all-seeing vertices, of the given type."""
        return cls(X, R if b.bottom_isolated else X, X, R if b.top_isolated else X)


def _fam_A(m, n):
    return 2 ** (m * n)


def _fam_A_sub_x(m, n):
    return (2 ** n - 1) ** m


def _fam_A_sub_boxx(m, n):
    return (2 ** n - 2) ** m


def _fam_B(m, n):
    return sum((-1) ** i * comb(m, i) * (2 ** (m - i) - 1) ** n for i in range(m + 1))


def _fam_B_sub_o(m, n):
    return (2 ** n - 1) ** m - (2 ** n - 2) ** m


def _fam_B_oo(m, n):
    return _fam_A(m, n) - _fam_A_sub_x(n, m) - _fam_A_sub_x(m, n) + _fam_B(m, n)


def _fam_B_sup_x_sub_o(m, n):
    return _fam_B_sub_o(m, n) - _fam_B_oo(m, n)


def _fam_B_xx(m, n):
    return _fam_B(m, n) - _fam_B_sub_o(m, n) - _fam_B_sub_o(n, m) + _fam_B_oo(m, n)


_BASE_FAMILIES = {
    (F_, F_, F_, F_): _fam_A,
    (F_, X, F_, F_): _fam_A_sub_x,
    (X, F_, F_, F_): _fam_A_sub_x,
    (X, X, F_, F_): _fam_A_sub_boxx,
    (X, F_, X, F_): _fam_B,
    (X, R, X, F_): _fam_B_sub_o,
    (X, R, X, R): _fam_B_oo,
    (X, R, X, X): _fam_B_sup_x_sub_o,
    (X, X, X, X): _fam_B_xx,
}


def _normalize(flags: QuarkFamilyFlags) -> QuarkFamilyFlags | None:
    """Make forced restrictions explicit; ``None`` marks an empty family.

    An isolated vertex on one side rules out all-seeing vertices on the other.
    """
    b_all, b_iso, t_all, t_iso = flags.as_tuple()
    for _ in range(2):
        if b_iso is R:
            if t_all is R:
                return None
            t_all = X
        if t_iso is R:
            if b_all is R:
                return None
            b_all = X
        if b_all is R:
            if t_iso is R:
                return None
            t_iso = X
        if t_all is R:
            if b_iso is R:
                return None
            b_iso = X
    return QuarkFamilyFlags(b_all, b_iso, t_all, t_iso)


def _lookup(flags: QuarkFamilyFlags):
    """Formula for ``flags``, trying the mirror and edge-complement symmetries."""
    for mirror in (False, True):
        for compl in (False, True):
            f = flags.mirrored() if mirror else flags
            f = f.complemented() if compl else f
            fn = _BASE_FAMILIES.get(f.as_tuple())
            if fn is not None:
                return (lambda m, n, fn=fn: fn(n, m)) if mirror else fn
    return None


def quark_family_count(m: int, n: int, flags: QuarkFamilyFlags) -> int:
    """Closed-form size of a bipartite family on ``m`` bottom and ``n`` top vertices.

    Out-of-domain sizes (``m == 0`` or ``n == 0``) give 0. Flag combinations
    outside the supported families raise ``ValueError``.
    """
    norm = _normalize(flags)
    fn = _lookup(flags) or (_lookup(norm) if norm is not None else None)
    if fn is None:
        if norm is None:
            return 0
        raise ValueError(f"unsupported quark family {flags}")
    if m <= 0 or n <= 0:
        return 0
    return fn(m, n)


def supported_families() -> list[QuarkFamilyFlags]:
    """Every flag combination :func:`quark_family_count` accepts."""
    out = []
    for combo in itertools.product(Flag, repeat=4):
        f = QuarkFamilyFlags(*combo)
        try:
            quark_family_count(1, 1, f)
        except ValueError:
            continue
        out.append(f)
    return out


# -- F series and the transfer matrix --------------------------------------------------

def _bounds(nx: int, nz: int, nt: int):
    return (nx, nz, nt)


@lru_cache(maxsize=None)
def F_series(b: BType, bounds=(DEFAULT_NX, 0, 0)) -> TruncatedSeries:
    """EGF of middle quarks of type ``b`` without all-seeing vertices, by size."""
    one = TruncatedSeries.one(bounds)
    em = exp_x(-1, bounds)
    P = psi(bounds)
    a = one - em
    c = em.scale(2) - one
    if b is BType.OO:
        return a * a * P
    if b in (BType.OX, BType.XO):
        return a * (c * P - one)
    return c * (c * P - one)


def F_from_counts(b: BType, bounds=(DEFAULT_NX, 0, 0), counter=quark_family_count) -> TruncatedSeries:
    """Same series assembled from per-size family counts."""
    flags = QuarkFamilyFlags.of_btype(b)
    vals = [sum(comb(s, m) * counter(m, s - m, flags) for m in range(1, s)) for s in range(bounds[0] + 1)]
    return TruncatedSeries.from_egf(vals, bounds)


def _s_block(i: int, j: int) -> int:
    return 0 if BTYPES[i].bottom_isolated and BTYPES[j].top_isolated else 1


def transfer_matrix(with_t: bool = False, bounds=None) -> SeriesMatrix:
    """``M[i][j] = (z + s_ij) F_j``, times ``t`` when ``with_t``."""
    bounds = bounds or (DEFAULT_NX, DEFAULT_NX, DEFAULT_NX if with_t else 0)
    z = TruncatedSeries.monomial(1, 0, 1, 0, bounds)
    Fs = [F_series(b, bounds) for b in BTYPES]
    rows = []
    for i in range(4):
        row = []
        for j in range(4):
            e = (z + _s_block(i, j)) * Fs[j]
            row.append(e.shift(dt=1) if with_t else e)
        rows.append(row)
    return SeriesMatrix(rows)


def _fast_step(bounds, with_t: bool):
    """``v -> M v`` using the structure of M (four products with x-only series)."""
    Fs = [F_series(b, bounds) for b in BTYPES]

    def step(v):
        u = [f * x for f, x in zip(Fs, v)]
        total = u[0] + u[1] + u[2] + u[3]
        zt = total.shift(dz=1)
        # rows with a bottom-isolated type cannot stick onto top-isolated columns
        out = []
        for i in range(4):
            s = sum((u[j] for j in range(4) if _s_block(i, j)), TruncatedSeries.zero(bounds))
            out.append(zt + s)
        return [o.shift(dt=1) for o in out] if with_t else out

    return step


def _row_col(bounds):
    z = TruncatedSeries.monomial(1, 0, 1, 0, bounds)
    one = TruncatedSeries.one(bounds)
    Fs = [F_series(b, bounds) for b in BTYPES]
    start = [z if b.top_isolated else one + z for b in BTYPES]
    row = [s * f for s, f in zip(start, Fs)]
    col = [z if b.bottom_isolated else one + z for b in BTYPES]
    return row, col, Fs


def _dot(a, b, bounds):
    acc = TruncatedSeries.zero(bounds)
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def _sequence_sum(vec, bounds, with_t: bool):
    M = transfer_matrix(with_t, bounds)
    return neumann_apply(M, vec, with_t, step=_fast_step(bounds, with_t))


@lru_cache(maxsize=None)
def strong_indecomposable_gf(nx: int = DEFAULT_NX) -> TruncatedSeries:
    """``I(x, z)``: trimmed sum-indecomposable posets, z marking placeholders."""
    bounds = _bounds(nx, nx, 0)
    row, col, _ = _row_col(bounds)
    w = _sequence_sum(col, bounds, False)
    return TruncatedSeries.monomial(1, 0, 1, 0, bounds) + _dot(row, w, bounds)


def _final(S: TruncatedSeries) -> TruncatedSeries:
    """Substitute ``z = e^x - 1`` and drop the now-empty z axis."""
    nx, _, nt = S.bounds
    ex = exp_x(1, S.bounds) - 1
    out = subst_z(S, ex)
    return out.restrict((nx, 0, nt))


def e(c: int, bounds) -> TruncatedSeries:
    return exp_x(c, bounds)


@lru_cache(maxsize=None)
def strong_gf(via_pipeline: bool = True, nx: int = DEFAULT_NX) -> TruncatedSeries:
    """EGF of strongly graded (3+1)-avoiding posets."""
    if via_pipeline:
        I = strong_indecomposable_gf(nx)
        return _final(invert(1 - I))
    b = _bounds(nx, 0, 0)
    P = psi(b)
    ex, e2 = e(1, b), e(2, b)
    numer = e2 * (ex.scale(2) - 3) + ex * (ex - 2) * (ex - 2) * P
    denom = ex * (ex.scale(2) + 1) + (e2 - ex.scale(2) - 1) * P
    return 1 + numer * invert(denom)


@lru_cache(maxsize=None)
def _height_vectors(nx: int):
    bounds = _bounds(nx, nx, nx)
    row, col, Fs = _row_col(bounds)
    e13 = [TruncatedSeries.one(bounds) if b.bottom_isolated else TruncatedSeries.zero(bounds) for b in BTYPES]
    w_col = _sequence_sum(col, bounds, True)
    w_13 = _sequence_sum(e13, bounds, True)
    return bounds, row, Fs, w_col, w_13


def _t2(S: TruncatedSeries) -> TruncatedSeries:
    return S.shift(dt=2)


@lru_cache(maxsize=None)
def strong_height_indecomposable_gf(nx: int = DEFAULT_NX) -> TruncatedSeries:
    """``H_I(x, z, t)``: sum-indecomposables of height at least 2, t marking height."""
    bounds, row, _, w_col, _ = _height_vectors(nx)
    return _t2(_dot(row, w_col, bounds))


@lru_cache(maxsize=None)
def strong_by_height_gf(via_pipeline: bool = True, nx: int = DEFAULT_NX) -> TruncatedSeries:
    """EGF of strongly graded (3+1)-avoiding posets with t marking height."""
    if via_pipeline:
        HI = strong_height_indecomposable_gf(nx)
        tz = TruncatedSeries.monomial(1, 0, 1, 1, HI.bounds)
        return _final(invert(1 - tz - HI))
    b = _bounds(nx, 0, nx)
    P = psi(b)
    t = TruncatedSeries.monomial(1, 0, 0, 1, b)
    t2 = t * t
    ex, e2 = e(1, b), e(2, b)
    em1 = ex - 1
    q = 1 - ex.scale(3) + e2
    numer = ex * (ex + t * e2 + t2 * em1 * em1) + t * (q + t * em1 * em1 * (ex - 2)) * P
    denom = ex * (ex + t * ex + t2) + (q * t + (ex - 2) * t2) * P
    return numer * invert(denom)


def weak_short_gf(nx: int = DEFAULT_NX) -> TruncatedSeries:
    """Weakly graded posets of height at most 2 (all of them avoid 3+1)."""
    b = _bounds(nx, 0, nx)
    t = TruncatedSeries.monomial(1, 0, 0, 1, b)
    ex = e(1, b)
    return 1 + t * (ex - 1) + t * t * (e(-1, b) * psi(b) - ex)


def _bottom_row(bounds, Fs):
    zero = TruncatedSeries.zero(bounds)
    return [Fs[i] if BTYPES[i].top_isolated else zero for i in range(4)]


@lru_cache(maxsize=None)
def weak_unlayerable_gf(nx: int = DEFAULT_NX) -> TruncatedSeries:
    """Summands failing strong gradedness at both ends (usable only alone)."""
    bounds, _, Fs, _, w_13 = _height_vectors(nx)
    return _t2(_dot(_bottom_row(bounds, Fs), w_13, bounds))


@lru_cache(maxsize=None)
def weak_top_bot_gf(nx: int = DEFAULT_NX) -> tuple[TruncatedSeries, TruncatedSeries]:
    """(top, bot): summands failing strong gradedness only at the top / only at the bottom."""
    bounds, row, Fs, w_col, w_13 = _height_vectors(nx)
    top = _t2(_dot(row, w_13, bounds))
    bot = _t2(_dot(_bottom_row(bounds, Fs), w_col, bounds))
    return top, bot


@lru_cache(maxsize=None)
def weak_layered_gf(nx: int = DEFAULT_NX, include_height_one: bool = True) -> TruncatedSeries:
    """Pipeline series before z-substitution and layer splicing."""
    U = weak_unlayerable_gf(nx)
    top, bot = weak_top_bot_gf(nx)
    HI = strong_height_indecomposable_gf(nx)
    inner = 1 - HI
    if include_height_one:
        inner = inner - TruncatedSeries.monomial(1, 0, 1, 1, HI.bounds)
    return U + (1 + top) * invert(inner) * (1 + bot)


@lru_cache(maxsize=None)
def weak_gf(via_pipeline: bool = True, nx: int = DEFAULT_NX, with_t: bool = True) -> TruncatedSeries:
    """EGF of weakly graded (3+1)-avoiding posets, t marking height.

    With ``with_t=False`` the result is the t = 1 specialization (bounds Nt = 0).
    """
    if via_pipeline:
        S = _final(weak_layered_gf(nx)).t_layers(3)
        out = S + weak_short_gf(nx)
        return out if with_t else subst_t_one(out).restrict((nx, 0, 0))
    if with_t:
        return _weak_closed_t(nx)
    return _weak_closed_t1(nx)


def _weak_closed_t(nx: int) -> TruncatedSeries:
    b = _bounds(nx, 0, nx)
    P = psi(b)
    t = TruncatedSeries.monomial(1, 0, 0, 1, b)
    ex, e2, e3 = e(1, b), e(2, b), e(3, b)
    q = 1 - ex.scale(3) + e2
    head = 1 + (ex - 1) * t + (e(-1, b) * P - ex) * t * t
    numer = (e3 + e3 * t - ex * (ex.scale(2) + (1 + ex.scale(2) - e2) * t) * P
             - (q + (ex - 2) * t) * P * P)
    denom = ex * (ex + t * ex + t * t) + (q * t + (ex - 2) * t * t) * P
    return head + (t * t * t) * numer * invert(denom)


def _weak_closed_t1(nx: int) -> TruncatedSeries:
    b = _bounds(nx, 0, 0)
    P = psi(b)
    ex, e2, e3 = e(1, b), e(2, b), e(3, b)
    numer = e3.scale(2) + e2 * (ex - 2) * P
    denom = ex * (ex.scale(2) + 1) + (e2 - ex.scale(2) - 1) * P
    return (e(-1, b) - 1) * P + numer * invert(denom)


def semiorder_gf(nx: int = DEFAULT_NX) -> TruncatedSeries:
    """Strongly graded posets avoiding both 3+1 and 2+2."""
    b = _bounds(nx, 0, 0)
    ex, e2 = e(1, b), e(2, b)
    return 1 + ex * (ex - 1) * (ex - 2) * invert(e2 - ex - 1)


# -- independent word enumeration ---------------------------------------------------------

def iter_words(n_quarks: int) -> Iterator[Word]:
    for types in itertools.product(BTYPES, repeat=n_quarks):
        for alphas in itertools.product("SG", repeat=n_quarks + 1):
            yield Word(alphas, types)


def word_sum(max_quarks: int, bounds, accept, Fs=None, with_t: bool = False) -> TruncatedSeries:
    """Sum of ``z^{#G} t^{height} prod F`` over the words accepted by ``accept``."""
    Fs = Fs or {b: F_series(b, bounds) for b in BTYPES}
    total = TruncatedSeries.zero(bounds)
    for k in range(1, max_quarks + 1):
        for w in iter_words(k):
            if not accept(w):
                continue
            term = TruncatedSeries.one(bounds)
            for b in w.types:
                term = term * Fs[b]
            term = term.shift(dz=w.alphas.count("G"), dt=(k + 1) if with_t else 0)
            total = total + term
    return total


def strong_word_sum(max_quarks: int, bounds) -> TruncatedSeries:
    return word_sum(max_quarks, bounds, lambda w: is_legal(w, LegalityMode.STRONG))


# -- count tables --------------------------------------------------------------------------

@dataclass
class CountTable:
    kind: str
    counts: dict = field(default_factory=dict)
    source: str | None = None

    def to_json_obj(self) -> dict:
        rows = []
        for key in sorted(self.counts):
            if isinstance(key, tuple):
                rows.append({"n": key[0], "k": key[1], "count": str(self.counts[key])})
            else:
                rows.append({"n": key, "count": str(self.counts[key])})
        obj = {"kind": self.kind, "counts": rows}
        if self.source:
            obj["source"] = self.source
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CountTable":
        counts = {}
        for row in obj["counts"]:
            key = (row["n"], row["k"]) if "k" in row else row["n"]
            counts[key] = int(row["count"])
        return cls(obj["kind"], counts, obj.get("source"))

    def with_source(self, source: str) -> "CountTable":
        return replace(self, source=source)


_FAMILIES = {
    "strong": lambda nx: strong_gf(True, nx),
    "weak": lambda nx: weak_gf(True, nx, with_t=False),
    "semiorder": semiorder_gf,
    "strong_by_height": lambda nx: strong_by_height_gf(True, nx),
    "weak_by_height": lambda nx: weak_gf(True, nx),
}


def count_table(kind: str, max_n: int, nx: int | None = None) -> CountTable:
    """Counts for ``n <= max_n`` read off the requested generating function."""
    if kind not in _FAMILIES:
        raise ValueError(f"unknown family {kind!r}")
    nx = max(nx or max_n, max_n, 1)
    S = _FAMILIES[kind](nx)
    counts: dict = {}
    for n in range(max_n + 1):
        if kind.endswith("by_height"):
            for k in range(n + 1):
                c = egf_count(S, n, k)
                if c:
                    counts[(n, k)] = c
        else:
            counts[n] = egf_count(S, n)
    return CountTable(kind, counts)
