"""Exact sparse linear solver over the rationals."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .. import kernels
from .numbers import Q, to_rational


class Infeasible(ValueError):
    """The linear system has no solution."""

    def __init__(self, row: int, message: str = "inconsistent linear system"):
        super().__init__(f"{message} (row {row})")
        self.row = row


@dataclass(frozen=True)
class LinearSolution:
    particular: list
    kernel: list = field(default_factory=list)
    pivots: tuple = ()

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _sparse_rows(A) -> tuple[list, int]:
    rows = []
    ncols = 0
    for r in A:
        if isinstance(r, Mapping):
            row = {int(c): to_rational(v) for c, v in r.items() if v}
            if row:
                ncols = max(ncols, max(row) + 1)
        else:
            row = {c: to_rational(v) for c, v in enumerate(r) if v}
            ncols = max(ncols, len(r))
        rows.append(row)
    return rows, ncols


def solve_rational_linear(
    A: Sequence,
    b: Sequence,
    ncols: int | None = None,
    with_kernel: bool = True,
) -> LinearSolution:
    """Solve ``A x = b`` exactly.

    ``A`` is a sequence of rows, each either a dense list or a sparse
    ``{column: value}`` mapping.  Columns are eliminated left to right; the
    pivot column set is the greedy (leftmost) column basis, so the returned
    particular solution, which is zero on every free column, does not depend
    on how rows are chosen.  Among the rows available for a column the
    sparsest one is used (ties: lowest row index) to limit fill-in.

    Raises :class:`Infeasible` when the system is inconsistent.
    """
    rows, inferred = _sparse_rows(A)
    if len(rows) != len(b):
        raise ValueError(f"{len(rows)} rows but {len(b)} right-hand sides")
    ncols = inferred if ncols is None else ncols
    if inferred > ncols:
        raise ValueError("row entry beyond declared column count")
    rhs_col = ncols
    for row, val in zip(rows, b):
        val = to_rational(val)
        if val:
            row[rhs_col] = val

    col_rows: dict = {}
    for i, row in enumerate(rows):
        for c in row:
            if c != rhs_col:
                col_rows.setdefault(c, set()).add(i)

    active = set(range(len(rows)))
    pivot_of: dict = {}
    axpy = kernels.row_axpy
    for col in range(ncols):
        cands = col_rows.get(col)
        if not cands:
            continue
        pr = min(cands, key=lambda i: (len(rows[i]), i))
        prow = rows[pr]
        pivot_of[col] = pr
        active.discard(pr)
        for c in prow:
            if c != rhs_col:
                col_rows[c].discard(pr)
        pval = prow[col]
        for i in sorted(col_rows[col]):
            target = rows[i]
            factor = target[col] / pval
            del target[col]
            added, removed = axpy(target, prow, factor, col)
            for c in added:
                if c != rhs_col:
                    col_rows.setdefault(c, set()).add(i)
            for c in removed:
                if c != rhs_col:
                    col_rows[c].discard(i)
        col_rows[col] = set()

    for i in sorted(active):
        if rows[i].get(rhs_col):
            raise Infeasible(i)

    pivots = tuple(sorted(pivot_of))
    x = [Q(0)] * ncols
    _back_substitute(rows, pivots, pivot_of, x, rhs_col, use_rhs=True)
    kernel = []
    if with_kernel:
        pivot_set = set(pivots)
        for free in range(ncols):
            if free in pivot_set:
                continue
            v = [Q(0)] * ncols
            v[free] = Q(1)
            _back_substitute(rows, pivots, pivot_of, v, rhs_col, use_rhs=False)
            kernel.append(v)
    return LinearSolution(x, kernel, pivots)


def _back_substitute(rows, pivots, pivot_of, x, rhs_col, use_rhs):
    for col in reversed(pivots):
        row = rows[pivot_of[col]]
        acc = row.get(rhs_col, Q(0)) if use_rhs else Q(0)
        for c, v in row.items():
            if c != col and c != rhs_col:
                xc = x[c]
                if xc:
                    acc -= v * xc
        x[col] = acc / row[col]


def check_solution(A: Sequence, x: Sequence, b: Sequence) -> bool:
    """``A x == b`` exactly."""
    rows, _ = _sparse_rows(A)
    for row, rhs in zip(rows, b):
        if sum((v * x[c] for c, v in row.items()), Q(0)) != to_rational(rhs):
            return False
    return True
