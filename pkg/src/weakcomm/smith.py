"""Smith normal form over arbitrary-precision integers, and the derived
abelianization / perfectness tests for presentations.

Pivots are chosen by minimal absolute value, which keeps coefficients small
at desk scale.  Invariant factors come out positive with each dividing the
next; zero diagonal entries are reported through ``free_rank``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .presentations import Presentation


@dataclass(frozen=True)
class IntegerMatrix:
    rows: tuple[tuple[int, ...], ...]
    num_cols: int

    def __post_init__(self) -> None:
        if self.num_cols < 0:
            raise ValueError("negative column count")
        for row in self.rows:
            if len(row) != self.num_cols:
                raise ValueError("ragged integer matrix")

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @staticmethod
    def make(rows: Sequence[Sequence[int]], num_cols: int | None = None) -> "IntegerMatrix":
        tup = tuple(tuple(int(v) for v in row) for row in rows)
        if num_cols is None:
            if not tup:
                raise ValueError("num_cols required for a matrix with no rows")
            num_cols = len(tup[0])
        return IntegerMatrix(tup, num_cols)


@dataclass(frozen=True)
class SmithForm:
    """Invariant factors d1 | d2 | ... (all positive) plus the count of zero
    columns in the diagonalized form (the free rank of the cokernel)."""

    factors: tuple[int, ...]
    free_rank: int

    def __post_init__(self) -> None:
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a != 0:
                raise ValueError(f"broken divisibility chain: {a} does not divide {b}")
        if any(f <= 0 for f in self.factors):
            raise ValueError("invariant factors must be positive")
        if self.free_rank < 0:
            raise ValueError("negative free rank")


def smith_normal_form(m: IntegerMatrix) -> SmithForm:
    a = [list(row) for row in m.rows]
    nr, nc = m.num_rows, m.num_cols
    factors: list[int] = []
    t = 0
    while t < nr and t < nc:
        pivot = _min_abs_position(a, t, nr, nc)
        if pivot is None:
            break
        i0, j0 = pivot
        if i0 != t:
            a[t], a[i0] = a[i0], a[t]
        if j0 != t:
            _swap_cols(a, t, j0, nr)
        while True:
            if a[t][t] < 0:
                a[t] = [-v for v in a[t]]
            piv = a[t][t]
            restarted = False
            for i in range(t + 1, nr):
                v = a[i][t]
                if v:
                    q = v // piv
                    if q:
                        rt = a[t]
                        a[i] = [x - q * y for x, y in zip(a[i], rt)]
                    if a[i][t]:
                        # remainder is a strictly smaller pivot candidate
                        a[t], a[i] = a[i], a[t]
                        restarted = True
                        break
            if restarted:
                continue
            for j in range(t + 1, nc):
                v = a[t][j]
                if v:
                    q = v // piv
                    if q:
                        for i in range(t, nr):
                            a[i][j] -= q * a[i][t]
                    if a[t][j]:
                        _swap_cols(a, t, j, nr)
                        restarted = True
                        break
            if restarted:
                continue
            offender = _divisibility_offender(a, t, nr, nc, piv)
            if offender is None:
                break
            # fold the offending row into row t and re-eliminate
            ro = a[offender]
            a[t] = [x + y for x, y in zip(a[t], ro)]
        factors.append(a[t][t])
        t += 1
    return SmithForm(tuple(factors), nc - len(factors))


def _min_abs_position(a, t, nr, nc):
    best = None
    pos = None
    for i in range(t, nr):
        row = a[i]
        for j in range(t, nc):
            v = row[j]
            if v:
                av = abs(v)
                if best is None or av < best:
                    best, pos = av, (i, j)
                    if av == 1:
                        return pos
    return pos


def _swap_cols(a, j1, j2, nr):
    for i in range(nr):
        row = a[i]
        row[j1], row[j2] = row[j2], row[j1]


def _divisibility_offender(a, t, nr, nc, piv):
    for i in range(t + 1, nr):
        row = a[i]
        for j in range(t + 1, nc):
            if row[j] % piv:
                return i
    return None


def exponent_matrix(p: Presentation) -> IntegerMatrix:
    """One row per relator, one column per generator, entries = exponent sums."""
    rows = tuple(tuple(r.exponent_sums(p.num_generators)) for r in p.relators)
    return IntegerMatrix(rows, p.num_generators)


def abelianization(p: Presentation) -> SmithForm:
    """Invariant factors and free rank of the abelianized group."""
    return smith_normal_form(exponent_matrix(p))


def is_perfect(p: Presentation) -> bool:
    """True iff the abelianization is trivial (all factors 1, free rank 0)."""
    snf = abelianization(p)
    return snf.free_rank == 0 and all(f == 1 for f in snf.factors)
