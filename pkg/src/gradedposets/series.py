"""Exact truncated power series in x (exponential), z and t (ordinary).

Coefficients are stored as one integer array plus a common denominator, with
the x-axis pre-multiplied by ``i!``: the coefficient of ``x^i z^j t^k`` is
``num[i, j, k] / (den * i!)``. Every series the counting pipelines touch then
has ``den == 1`` and products become binomial convolutions of integers.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd
from typing import Iterable, Sequence

import numpy as np

Bounds = tuple[int, int, int]
DEFAULT_BOUNDS: Bounds = (16, 16, 16)


def _zeros(shape) -> np.ndarray:
    return np.zeros(shape, dtype=object)


@lru_cache(maxsize=None)
def _binom_row(n: int) -> tuple[int, ...]:
    return tuple(comb(n, i) for i in range(n + 1))


def _plane_entries(P: np.ndarray) -> list[tuple[int, int, object]]:
    js, ks = np.nonzero(P)
    return [(int(j), int(k), P[j, k]) for j, k in zip(js, ks)]


def _plane_box(P: np.ndarray) -> np.ndarray | None:
    js, ks = np.nonzero(P)
    if len(js) == 0:
        return None
    return P[: js.max() + 1, : ks.max() + 1]


def _conv2_into(out: np.ndarray, entries, Bp: np.ndarray, c) -> None:
    """``out += c * (entries ⊛ Bp)`` truncated to ``out``'s shape."""
    nz, nt = out.shape
    bj, bk = Bp.shape
    for j, k, a in entries:
        ej, ek = min(bj, nz - j), min(bk, nt - k)
        if ej <= 0 or ek <= 0:
            continue
        out[j:j + ej, k:k + ek] += (c * a) * Bp[:ej, :ek]


def _plane_inverse(P: np.ndarray) -> np.ndarray:
    """Inverse of a truncated (z, t) power series with nonzero constant term."""
    nz, nt = P.shape
    u0 = P[0, 0]
    inv0 = u0 if u0 in (1, -1) else Fraction(1, 1) / u0
    E = -P * inv0
    E[0, 0] = 0
    entries = _plane_entries(E)
    result = _zeros(P.shape)
    result[0, 0] = 1
    term = result.copy()
    for _ in range(nz + nt):
        if not entries:
            break
        nxt = _zeros(P.shape)
        box = _plane_box(term)
        if box is None:
            break
        _conv2_into(nxt, entries, box, 1)
        term = nxt
        result = result + term
    return result * inv0


class TruncatedSeries:
    """Series in x, z, t truncated at ``bounds = (Nx, Nz, Nt)``.

    Instances are treated as immutable.
    """

    __slots__ = ("bounds", "num", "den")

    def __init__(self, bounds: Bounds, num: np.ndarray, den: int = 1, normalize: bool = True):
        self.bounds = tuple(bounds)
        if num.shape != tuple(b + 1 for b in self.bounds):
            raise ValueError(f"array shape {num.shape} does not match bounds {bounds}")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        self.num = num
        self.den = den
        if normalize and den != 1:
            self._reduce()

    def _reduce(self) -> None:
        g = self.den
        for v in self.num.flat:
            if v:
                g = gcd(g, v)
                if g == 1:
                    return
        if g > 1:
            self.num = self.num // g
            self.den //= g

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, bounds: Bounds = DEFAULT_BOUNDS) -> "TruncatedSeries":
        return cls(bounds, _zeros(tuple(b + 1 for b in bounds)))

    @classmethod
    def one(cls, bounds: Bounds = DEFAULT_BOUNDS) -> "TruncatedSeries":
        return cls.monomial(1, 0, 0, 0, bounds)

    @classmethod
    def monomial(cls, c, i: int, j: int, k: int, bounds: Bounds = DEFAULT_BOUNDS) -> "TruncatedSeries":
        if not (0 <= i <= bounds[0] and 0 <= j <= bounds[1] and 0 <= k <= bounds[2]):
            raise ValueError(f"exponent {(i, j, k)} outside bounds {bounds}")
        c = Fraction(c)
        num = _zeros(tuple(b + 1 for b in bounds))
        num[i, j, k] = c.numerator * factorial(i)
        return cls(bounds, num, c.denominator)

    @classmethod
    def from_coeffs(cls, coeffs: dict, bounds: Bounds = DEFAULT_BOUNDS) -> "TruncatedSeries":
        """Build from ``{(i, j, k): rational}``; exponents beyond the bounds are dropped."""
        fr = {e: Fraction(c) for e, c in coeffs.items()
              if e[0] <= bounds[0] and e[1] <= bounds[1] and e[2] <= bounds[2]}
        den = 1
        for c in fr.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = _zeros(tuple(b + 1 for b in bounds))
        for (i, j, k), c in fr.items():
            num[i, j, k] = c.numerator * (den // c.denominator) * factorial(i)
        return cls(bounds, num, den)

    @classmethod
    def from_egf(cls, values: Sequence[int], bounds: Bounds = DEFAULT_BOUNDS) -> "TruncatedSeries":
        """x-only series with ``n! [x^n] = values[n]``."""
        num = _zeros(tuple(b + 1 for b in bounds))
        for i, v in enumerate(values[: bounds[0] + 1]):
            num[i, 0, 0] = int(v)
        return cls(bounds, num)

    # -- access ---------------------------------------------------------------

    def coeff(self, i: int, j: int = 0, k: int = 0) -> Fraction:
        return Fraction(self.num[i, j, k], self.den * factorial(i))

    def coeffs(self) -> dict[tuple[int, int, int], Fraction]:
        idx = np.argwhere(self.num != 0)
        return {(int(i), int(j), int(k)): self.coeff(int(i), int(j), int(k)) for i, j, k in idx}

    def dump(self) -> list[tuple[int, int, int, str, str]]:
        """Nonzero coefficients as ``(i, j, k, numerator, denominator)`` in lexicographic order."""
        out = []
        for (i, j, k), c in sorted(self.coeffs().items()):
            out.append((i, j, k, str(c.numerator), str(c.denominator)))
        return out

    def is_zero(self) -> bool:
        return not self.num.any()

    def x_valuation(self) -> int | None:
        for i in range(self.bounds[0] + 1):
            if self.num[i].any():
                return i
        return None

    def t_valuation(self) -> int | None:
        for k in range(self.bounds[2] + 1):
            if self.num[:, :, k].any():
                return k
        return None

    def is_x_only(self) -> bool:
        return not self.num[:, 1:, :].any() and not self.num[:, :, 1:].any()

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.bounds == other.bounds and self.den == other.den
                and bool(np.all(self.num == other.num)))

    __hash__ = None

    def __repr__(self):
        items = sorted(self.coeffs().items())[:6]
        body = " + ".join(f"({c})x^{i}z^{j}t^{k}" for (i, j, k), c in items)
        more = " + ..." if len(self.coeffs()) > 6 else ""
        return f"TruncatedSeries({body or '0'}{more}, bounds={self.bounds})"

    # -- ring operations ------------------------------------------------------

    def _check(self, other: "TruncatedSeries") -> None:
        if self.bounds != other.bounds:
            raise ValueError(f"bound mismatch: {self.bounds} vs {other.bounds}")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + self._lift(other)
        self._check(other)
        if self.den == other.den:
            return TruncatedSeries(self.bounds, self.num + other.num, self.den)
        g = gcd(self.den, other.den)
        a, b = other.den // g, self.den // g
        return TruncatedSeries(self.bounds, self.num * a + other.num * b, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.bounds, -self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedSeries) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def _lift(self, c) -> "TruncatedSeries":
        return TruncatedSeries.monomial(c, 0, 0, 0, self.bounds)

    def scale(self, c) -> "TruncatedSeries":
        c = Fraction(c)
        return TruncatedSeries(self.bounds, self.num * c.numerator, self.den * c.denominator)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        return TruncatedSeries(self.bounds, _mul_arrays(self.num, other.num), self.den * other.den)

    def __rmul__(self, other):
        return self.scale(other)

    def shift(self, dz: int = 0, dt: int = 0) -> "TruncatedSeries":
        """Multiply by ``z**dz * t**dt`` (truncating)."""
        _, Nz, Nt = self.bounds
        num = _zeros(self.num.shape)
        if dz <= Nz and dt <= Nt:
            num[:, dz:, dt:] = self.num[:, : Nz + 1 - dz, : Nt + 1 - dt]
        return TruncatedSeries(self.bounds, num, self.den)

    def restrict(self, bounds: Bounds) -> "TruncatedSeries":
        """Re-truncate to smaller bounds."""
        if any(b > c for b, c in zip(bounds, self.bounds)):
            raise ValueError("restrict can only shrink bounds")
        num = self.num[: bounds[0] + 1, : bounds[1] + 1, : bounds[2] + 1].copy()
        return TruncatedSeries(bounds, num, self.den)

    def t_layers(self, lo: int, hi: int | None = None) -> "TruncatedSeries":
        """Keep only the ``t^k`` layers with ``lo <= k <= hi``."""
        hi = self.bounds[2] if hi is None else hi
        num = _zeros(self.num.shape)
        num[:, :, lo:hi + 1] = self.num[:, :, lo:hi + 1]
        return TruncatedSeries(self.bounds, num, self.den)


def _mul_arrays(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Binomial convolution in x, ordinary in z and t, truncated to A's shape."""
    if np.count_nonzero(A) > np.count_nonzero(B):
        A, B = B, A
    nx = A.shape[0]
    out = _zeros(A.shape)
    a_planes = [(i, _plane_entries(A[i])) for i in range(nx)]
    b_planes = [(l, _plane_box(B[l])) for l in range(nx)]
    a_planes = [(i, e) for i, e in a_planes if e]
    b_planes = [(l, p) for l, p in b_planes if p is not None]
    for i, entries in a_planes:
        for l, Bp in b_planes:
            n = i + l
            if n >= nx:
                break
            _conv2_into(out[n], entries, Bp, _binom_row(n)[i])
    return out


def invert(S: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; the constant coefficient must be nonzero."""
    N = S.num
    if N[0, 0, 0] == 0:
        raise ZeroDivisionError("series has zero constant term")
    nx = N.shape[0]
    R0 = _plane_inverse(N[0])
    R = [R0]
    n_planes = [(i, _plane_entries(N[i])) for i in range(1, nx)]
    n_planes = [(i, e) for i, e in n_planes if e]
    r0_entries = _plane_entries(R0)
    for n in range(1, nx):
        acc = _zeros(N[0].shape)
        for i, entries in n_planes:
            if i > n:
                break
            box = _plane_box(R[n - i])
            if box is not None:
                _conv2_into(acc, entries, box, _binom_row(n)[i])
        out = _zeros(N[0].shape)
        box = _plane_box(acc)
        if box is not None:
            _conv2_into(out, r0_entries, box, -1)
        R.append(out)
    arr = np.stack(R)
    den = 1
    if any(isinstance(v, Fraction) for v in arr.flat):
        for v in arr.flat:
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
        arr = np.vectorize(lambda v: int(Fraction(v) * den), otypes=[object])(arr)
    return TruncatedSeries(S.bounds, arr * S.den, den)


def exp_x(c: int, bounds: Bounds = DEFAULT_BOUNDS) -> TruncatedSeries:
    """``e^{c x}``."""
    return TruncatedSeries.from_egf([c ** i for i in range(bounds[0] + 1)], bounds)


def psi_numerators(n_max: int) -> list[int]:
    """``n! * psi_n`` for ``n <= n_max``."""
    return [sum(comb(n, i) * 2 ** (i * (n - i)) for i in range(n + 1)) for n in range(n_max + 1)]


def psi(bounds: Bounds = DEFAULT_BOUNDS) -> TruncatedSeries:
    """``sum_{m,n} 2^{mn} x^{m+n} / (m! n!)``."""
    return TruncatedSeries.from_egf(psi_numerators(bounds[0]), bounds)


def subst_z(S: TruncatedSeries, R: TruncatedSeries) -> TruncatedSeries:
    """Substitute ``z := R`` for an x-only ``R`` with zero constant term."""
    S._check(R)
    if not R.is_x_only():
        raise ValueError("substituted series must depend on x only")
    if R.num[0, 0, 0] != 0:
        raise ValueError("substituted series must have zero constant term")
    Nz = S.bounds[1]

    def layer(j: int) -> TruncatedSeries:
        num = _zeros(S.num.shape)
        num[:, 0, :] = S.num[:, j, :]
        return TruncatedSeries(S.bounds, num, S.den)

    acc = layer(Nz)
    for j in range(Nz - 1, -1, -1):
        acc = acc * R + layer(j)
    return acc


def subst_t_one(S: TruncatedSeries) -> TruncatedSeries:
    """Set ``t = 1`` by summing the t-layers."""
    num = _zeros(S.num.shape)
    num[:, :, 0] = S.num.sum(axis=2)
    return TruncatedSeries(S.bounds, num, S.den)


def egf_count(S: TruncatedSeries, n: int, k: int | None = None) -> int:
    """``n! [x^n] S`` (or of the ``t^k`` layer), checked to be an integer.

    Without ``k`` the coefficient must carry no z or t dependence.
    """
    if n > S.bounds[0]:
        raise ValueError(f"order {n} exceeds Nx = {S.bounds[0]}")
    if k is None:
        plane = S.num[n]
        if plane[1:, :].any() or plane[:, 1:].any():
            raise ValueError(f"coefficient of x^{n} still depends on z or t")
        v = plane[0, 0]
    else:
        if S.num[n, 1:, k].any():
            raise ValueError(f"coefficient of x^{n} t^{k} still depends on z")
        v = S.num[n, 0, k]
    q, r = divmod(v, S.den)
    if r:
        raise ValueError(f"non-integer count {Fraction(v, S.den)} at x^{n}")
    return int(q)


# -- 4x4 matrices ----------------------------------------------------------------

class SeriesMatrix:
    """Square matrix of series sharing one set of bounds (4x4 for the BTypes)."""

    __slots__ = ("entries", "bounds")

    def __init__(self, entries: Sequence[Sequence[TruncatedSeries]]):
        self.entries = [list(row) for row in entries]
        size = len(self.entries)
        if any(len(row) != size for row in self.entries):
            raise ValueError("matrix must be square")
        bounds = {e.bounds for row in self.entries for e in row}
        if len(bounds) != 1:
            raise ValueError("entries must share bounds")
        self.bounds = bounds.pop()

    @property
    def size(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, size: int = 4, bounds: Bounds = DEFAULT_BOUNDS) -> "SeriesMatrix":
        one, zero = TruncatedSeries.one(bounds), TruncatedSeries.zero(bounds)
        return cls([[one if i == j else zero for j in range(size)] for i in range(size)])

    @classmethod
    def zeros(cls, size: int = 4, bounds: Bounds = DEFAULT_BOUNDS) -> "SeriesMatrix":
        zero = TruncatedSeries.zero(bounds)
        return cls([[zero] * size for _ in range(size)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return SeriesMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        return SeriesMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def map(self, f) -> "SeriesMatrix":
        return SeriesMatrix([[f(a) for a in row] for row in self.entries])

    def apply(self, v: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
        return [_dot(row, v, self.bounds) for row in self.entries]

    def apply_left(self, v: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
        cols = list(zip(*self.entries))
        return [_dot(v, col, self.bounds) for col in cols]


def _dot(a: Iterable[TruncatedSeries], b: Iterable[TruncatedSeries], bounds: Bounds) -> TruncatedSeries:
    acc = TruncatedSeries.zero(bounds)
    for x, y in zip(a, b):
        if x.is_zero() or y.is_zero():
            continue
        acc = acc + x * y
    return acc


def mat_mul(A: SeriesMatrix, B: SeriesMatrix) -> SeriesMatrix:
    cols = list(zip(*B.entries))
    return SeriesMatrix([[_dot(row, col, A.bounds) for col in cols] for row in A.entries])


def _neumann_terms(M: SeriesMatrix, with_t: bool) -> int:
    Nx, _, Nt = M.bounds
    for row in M.entries:
        for e in row:
            if e.is_zero():
                continue
            if with_t:
                v = e.t_valuation()
                if v is None or v < 1:
                    raise ValueError("entries must carry a factor of t")
            else:
                v = e.x_valuation()
                if v is None or v < 2:
                    raise ValueError("entries must have x-valuation at least 2")
    return Nt if with_t else Nx // 2


def mat_neumann_inverse(M: SeriesMatrix, with_t: bool = False) -> SeriesMatrix:
    """``(I - M)^{-1}`` as the finite sum ``sum_{p <= P} M^p``."""
    P = _neumann_terms(M, with_t)
    total = SeriesMatrix.identity(M.size, M.bounds)
    power = total
    for _ in range(P):
        power = mat_mul(power, M)
        total = total + power
    return total


def neumann_apply(M: SeriesMatrix, v: Sequence[TruncatedSeries], with_t: bool = False,
                  step=None) -> list[TruncatedSeries]:
    """``(I - M)^{-1} v`` via ``v + Mv + M^2 v + ...``; ``step`` may replace ``M.apply``."""
    P = _neumann_terms(M, with_t)
    step = step or M.apply
    total = list(v)
    cur = list(v)
    for _ in range(P):
        cur = step(cur)
        if all(c.is_zero() for c in cur):
            break
        total = [a + b for a, b in zip(total, cur)]
    return total
