"""Poincaré polynomials of M̄_{0,n} from Keel's point-count recursion.

This is written independently of the monomial basis enumeration so it can
serve as the dimension oracle for it:

    P_3 = 1
    P_{n+1}(q) = (1 + q) P_n(q) + (q / 2) * sum_{j=2}^{n-2} C(n, j) P_{j+1}(q) P_{n-j+1}(q)

Coefficient ``k`` of ``P_n`` is dim H^{2k}(M̄_{0,n}).
"""
from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Dict, Tuple


def _poly_add(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    n = max(len(a), len(b))
    return tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _poly_mul(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


@lru_cache(maxsize=None)
def poincare_polynomial(n: int) -> Tuple[int, ...]:
    """Coefficients of P_n(q) for M̄_{0,n}, lowest degree first."""
    if n < 3:
        raise ValueError(f"M̄_(0,n) needs n >= 3 marked points, got {n}")
    if n == 3:
        return (1,)
    prev = poincare_polynomial(n - 1)
    m = n - 1
    acc: Tuple[int, ...] = (0,)
    for j in range(2, m - 1):
        term = _poly_mul(poincare_polynomial(j + 1), poincare_polynomial(m - j + 1))
        acc = _poly_add(acc, tuple(comb(m, j) * c for c in term))
    if any(c % 2 for c in acc):
        raise ArithmeticError(f"odd splitting sum in Keel recursion at n={n}")
    split = (0,) + tuple(c // 2 for c in acc)
    result = _poly_add(_poly_mul((1, 1), prev), split)
    while len(result) > 1 and result[-1] == 0:
        result = result[:-1]
    return result


def betti_oracle(n_labels: int) -> Dict[int, int]:
    """Even-degree Betti numbers of M̄_{0,1+n_labels} keyed by cohomological degree."""
    poly = poincare_polynomial(n_labels + 1)
    return {2 * k: c for k, c in enumerate(poly)}
