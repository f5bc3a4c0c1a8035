"""Growth of the psi coefficients and the count-to-psi ratios."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import comb, factorial

from .genfun import strong_gf, weak_gf
from .series import egf_count

PRECISION = 50
DIGITS = 40


def psi_exact(n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Fraction(sum(comb(n, i) * 2 ** (i * (n - i)) for i in range(n + 1)), factorial(n))


def _dec(q: Fraction) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return Decimal(q.numerator) / Decimal(q.denominator)


def theta_partial(terms: int) -> tuple[Fraction, Fraction]:
    """Exact partial sums: ``sum_{|i|<=terms} 2^{-i^2}`` and ``2 sum_{0<=m<=terms} 2^{-m(m+1)}``."""
    c1 = Fraction(1) + 2 * sum(Fraction(1, 2 ** (i * i)) for i in range(1, terms + 1))
    c2 = 2 * sum(Fraction(1, 2 ** (m * (m + 1))) for m in range(terms + 1))
    return c1, c2


def theta_constants(terms: int = 12) -> tuple[Decimal, Decimal, Decimal]:
    """(C1, C2, truncation error bound) to ``PRECISION`` significant digits.

    The odd-index constant carries a factor ``2^{1/4}`` that cancels against
    the half-integer exponents, leaving a rational series.
    """
    if terms < 10:
        raise ValueError("terms must be at least 10")
    c1, c2 = theta_partial(terms)
    err = Fraction(2, 2 ** (terms * terms))
    return _dec(c1), _dec(c2), _dec(err)


def _half_scale(n: int) -> Fraction:
    a, b = n // 2, n - n // 2
    return Fraction(2 ** (a * b), factorial(a) * factorial(b))


def normalized_psi(n: int) -> Fraction:
    """``psi_n`` divided by its dominant term; increases toward C1 or C2."""
    return psi_exact(n) / _half_scale(n)


@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    psi_n: Fraction
    predicted: Decimal
    ratio_psi: Decimal
    ratio_strong: Decimal
    ratio_weak: Decimal


@dataclass
class AsymptoticReport:
    rows: list[AsymptoticRow]
    c1: Decimal
    c2: Decimal
    error_bound: Decimal

    def to_json(self) -> str:
        obj = {
            "C1": _fmt(self.c1),
            "C2": _fmt(self.c2),
            "theta_error_bound": f"{self.error_bound:.6E}",
            "rows": [
                {
                    "n": r.n,
                    "psi_n": str(r.psi_n),
                    "predicted": _fmt(r.predicted),
                    "ratio_psi": _fmt(r.ratio_psi),
                    "ratio_strong": _fmt(r.ratio_strong),
                    "ratio_weak": _fmt(r.ratio_weak),
                }
                for r in self.rows
            ],
        }
        return json.dumps(obj, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "psi_n", "predicted", "ratio_psi", "ratio_strong", "ratio_weak"])
        for r in self.rows:
            w.writerow([r.n, str(r.psi_n), _fmt(r.predicted), _fmt(r.ratio_psi),
                        _fmt(r.ratio_strong), _fmt(r.ratio_weak)])
        return buf.getvalue()


def _fmt(d: Decimal) -> str:
    return f"{d:.{DIGITS}g}"


def ratio_report(max_n: int = 16, terms: int = 12) -> AsymptoticReport:
    c1, c2, err = theta_constants(terms)
    nx = max(max_n, 1)
    g = strong_gf(True, nx)
    w = weak_gf(True, nx, with_t=False)
    rows = []
    with localcontext() as ctx:
        ctx.prec = PRECISION
        for n in range(1, max_n + 1):
            p = psi_exact(n)
            pred = (c1 if n % 2 == 0 else c2) * _dec(_half_scale(n))
            scale = factorial(n) * p
            rows.append(AsymptoticRow(
                n=n,
                psi_n=p,
                predicted=pred,
                ratio_psi=_dec(p) / pred,
                ratio_strong=_dec(Fraction(egf_count(g, n)) / scale),
                ratio_weak=_dec(Fraction(egf_count(w, n)) / scale),
            ))
    return AsymptoticReport(rows, c1, c2, err)
