"""Exact linear feasibility over the rationals (phase-one simplex, Bland's rule)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

_ZERO = Fraction(0)


def feasible_point(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Return some ``x >= 0`` with ``A x = b``, or ``None`` if none exists.

    Bland's rule guarantees termination; all arithmetic is exact.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if any(len(row) != n for row in A) or len(b) != m:
        raise ValueError("A must be rectangular and match len(b)")
    if m == 0:
        return [_ZERO] * n

    width = n + m
    tableau = []
    for i, (row, rhs) in enumerate(zip(A, b)):
        sign = -1 if rhs < 0 else 1
        r = [Fraction(sign * v) for v in row]
        r.extend(Fraction(1) if k == i else _ZERO for k in range(m))
        r.append(Fraction(sign * rhs))
        tableau.append(r)
    basis = list(range(n, width))
    # reduced costs of the phase-one objective (sum of artificials)
    reduced = [-sum((tableau[i][j] for i in range(m)), _ZERO) if j < n else _ZERO for j in range(width)]
    objective = sum((tableau[i][width] for i in range(m)), _ZERO)

    while True:
        entering = next((j for j in range(width) if reduced[j] < 0), None)
        if entering is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # cannot happen: phase one is bounded below by zero
            raise ArithmeticError("unbounded phase-one problem")
        piv_row = tableau[leave]
        piv = piv_row[entering]
        if piv != 1:
            piv_row[:] = [v / piv for v in piv_row]
        for i in range(m):
            if i != leave:
                f = tableau[i][entering]
                if f:
                    row = tableau[i]
                    for k in range(width + 1):
                        if piv_row[k]:
                            row[k] -= f * piv_row[k]
        f = reduced[entering]
        for k in range(width):
            if piv_row[k]:
                reduced[k] -= f * piv_row[k]
        objective += f * piv_row[width]
        basis[leave] = entering

    if objective != 0:
        return None
    x = [_ZERO] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = tableau[i][width]
    return x


def dominated_by_hull(point: Sequence[Fraction], generators: Sequence[Sequence[Fraction]]) -> list[Fraction] | None:
    """Find convex weights ``lam`` with ``sum_j lam_j g_j >= point`` componentwise.

    Returns the weights, or ``None`` when ``point`` lies outside the convex
    hull of ``generators`` shifted down by the nonnegative orthant.
    """
    k = len(generators)
    if k == 0:
        return None
    dim = len(point)
    # variables: lam_0..lam_{k-1}, surplus_0..surplus_{dim-1}
    A = []
    b = []
    for s in range(dim):
        row = [Fraction(g[s]) for g in generators]
        row.extend(Fraction(-1) if t == s else _ZERO for t in range(dim))
        A.append(row)
        b.append(Fraction(point[s]))
    A.append([Fraction(1)] * k + [_ZERO] * dim)
    b.append(Fraction(1))
    x = feasible_point(A, b)
    return None if x is None else x[:k]
