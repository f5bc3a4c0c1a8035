"""Exhaustive kernels behind the oracle.

Posets on ``n <= 7`` elements are stored one per row as ``uint8`` down-masks:
``down[p, v]`` has bit ``u`` set iff ``u < v``.
"""
from __future__ import annotations

import numpy as np

from ._jit import njit

GRADED = 1
STRONG = 2
HAS_3P1 = 4
HAS_2P2 = 8
VIGILANT = 16
FAR_COMPARABLE = 32
NEAR_COMPARABLE = 64


@njit(cache=True)
def _up_masks(d, n):
    up = np.zeros(n, np.int64)
    for v in range(n):
        for u in range(n):
            if d[v] >> u & 1:
                up[u] |= 1 << v
    return up


@njit(cache=True)
def _extend(down, m, out, write):
    """Insert element ``m`` into every poset of ``down``; count or write the results."""
    pos = 0
    for p in range(down.shape[0]):
        d = down[p]
        up = _up_masks(d, m)
        for D in range(1 << m):
            ok = True
            for v in range(m):
                if D >> v & 1 and (d[v] & ~D):
                    ok = False
                    break
            if not ok:
                continue
            for U in range(1 << m):
                if U & D:
                    continue
                good = True
                for v in range(m):
                    if U >> v & 1:
                        if (up[v] & ~U) or (D & ~d[v]):
                            good = False
                            break
                if not good:
                    continue
                if write:
                    for v in range(m):
                        if U >> v & 1:
                            out[pos, v] = d[v] | (1 << m) | D
                        else:
                            out[pos, v] = d[v]
                    out[pos, m] = D
                pos += 1
    return pos


def extend_level(down: np.ndarray) -> np.ndarray:
    m = down.shape[1]
    # widen so mask complements stay signed on the pure-Python path
    down = down.astype(np.int64)
    dummy = np.zeros((1, m + 1), np.uint8)
    count = _extend(down, m, dummy, False)
    out = np.zeros((count, m + 1), np.uint8)
    _extend(down, m, out, True)
    return out


@njit(cache=True)
def _classify_one(d, n):
    up = _up_masks(d, n)
    comp = np.zeros(n, np.int64)
    for v in range(n):
        comp[v] = up[v] | d[v] | (1 << v)
    full = (1 << n) - 1
    flags = 0

    has31 = False
    for x in range(n):
        for y in range(n):
            if not (up[x] >> y & 1):
                continue
            for z in range(n):
                if up[y] >> z & 1 and (full & ~(comp[x] | comp[y] | comp[z])):
                    has31 = True
    if has31:
        flags |= HAS_3P1
    has22 = False
    for a in range(n):
        for b in range(n):
            if not (up[a] >> b & 1):
                continue
            blocked = comp[a] | comp[b]
            for c in range(n):
                if blocked >> c & 1:
                    continue
                if up[c] & ~blocked:
                    has22 = True
    if has22:
        flags |= HAS_2P2

    cu = np.zeros(n, np.int64)
    cd = np.zeros(n, np.int64)
    for v in range(n):
        implied = 0
        for c in range(n):
            if d[v] >> c & 1:
                implied |= d[c]
        cd[v] = d[v] & ~implied
    for v in range(n):
        for u in range(n):
            if cd[v] >> u & 1:
                cu[u] |= 1 << v

    NONE = -(1 << 20)
    rank = np.full(n, NONE, np.int64)
    stack = np.zeros(n, np.int64)
    member = np.zeros(n, np.int64)
    for s in range(n):
        if rank[s] != NONE:
            continue
        rank[s] = 0
        top = 0
        stack[top] = s
        top += 1
        cnt = 0
        while top > 0:
            top -= 1
            v = stack[top]
            member[cnt] = v
            cnt += 1
            for w in range(n):
                step = 0
                if cu[v] >> w & 1:
                    step = 1
                elif cd[v] >> w & 1:
                    step = -1
                else:
                    continue
                want = rank[v] + step
                if rank[w] == NONE:
                    rank[w] = want
                    stack[top] = w
                    top += 1
                elif rank[w] != want:
                    return flags, -1
        low = rank[member[0]]
        for i in range(cnt):
            if rank[member[i]] < low:
                low = rank[member[i]]
        for i in range(cnt):
            rank[member[i]] -= low
    flags |= GRADED

    h = 0
    for v in range(n):
        if rank[v] + 1 > h:
            h = rank[v] + 1
    lv = np.zeros(h + 2, np.int64)
    for v in range(n):
        lv[rank[v]] |= 1 << v

    rmin = -1
    rmax = -1
    strong = True
    for v in range(n):
        if d[v] == 0:
            if rmin == -1:
                rmin = rank[v]
            elif rmin != rank[v]:
                strong = False
        if up[v] == 0:
            if rmax == -1:
                rmax = rank[v]
            elif rmax != rank[v]:
                strong = False
    if strong:
        flags |= STRONG

    vig = True
    far = True
    near = True
    for v in range(n):
        r = rank[v]
        up_seeing = (lv[r + 1] & ~up[v]) == 0
        down_seeing = True
        if r > 0:
            down_seeing = (lv[r - 1] & ~d[v]) == 0
        if not (up_seeing or down_seeing):
            vig = False
        if r + 2 < h and (lv[r + 2] & ~comp[v]):
            near = False
        for s in range(r + 2, h):
            if lv[s] & ~comp[v]:
                far = False
    if vig:
        flags |= VIGILANT
    if far:
        flags |= FAR_COMPARABLE
    if near:
        flags |= NEAR_COMPARABLE
    return flags, h


@njit(cache=True)
def _classify_all(down):
    count, n = down.shape
    flags = np.zeros(count, np.int32)
    heights = np.zeros(count, np.int32)
    for p in range(count):
        f, h = _classify_one(down[p], n)
        flags[p] = f
        heights[p] = h
    return flags, heights


def classify_all(down: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flag bits and heights (``-1`` when not weakly graded) for every row."""
    return _classify_all(down.astype(np.int64))


@njit(cache=True)
def bipartite_histogram(m, n):
    """Tally all ``2**(m*n)`` bipartite graphs by four presence bits.

    Index bits: 8 bottom all-seeing, 4 bottom isolated, 2 top all-seeing,
    1 top isolated.
    """
    hist = np.zeros(16, np.int64)
    full_top = (1 << n) - 1
    total = 1 << (m * n)
    for g in range(total):
        b_all = False
        b_iso = False
        col_or = 0
        col_and = full_top
        for a in range(m):
            row = (g >> (a * n)) & full_top
            if row == full_top:
                b_all = True
            if row == 0:
                b_iso = True
            col_or |= row
            col_and &= row
        t_all = m > 0 and col_and != 0
        t_iso = col_or != full_top
        idx = 8 * b_all + 4 * b_iso + 2 * t_all + t_iso
        hist[idx] += 1
    return hist
