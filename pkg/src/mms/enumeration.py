"""Enumeration of full-dimensional even simplices {0, v_1..v_n} with
nonnegative vertices of 1-norm at most 2d.

Index sets into the lex-ordered vertex list are walked in lex order with
exact integer rank pruning: once a prefix of rows is rank-deficient, every
index set extending it is skipped.  Rank state is kept only along the
current path (structural sharing, rows are immutable), so the walk streams
in bounded memory.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .geometry import Point, SimplicialSet, _nonneg_ball


@dataclass(frozen=True)
class VertexList:
    n: int
    two_d: int
    rows: tuple[Point, ...]


@lru_cache(maxsize=64)
def vertex_list(n: int, two_d: int) -> VertexList:
    """Lex-ordered even nonzero points of N^n with 1-norm <= 2d.

    Built by doubling the 1-norm ball of radius d (doubling preserves lex
    order) and dropping the origin.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if two_d < 2 or two_d % 2 != 0:
        raise ValueError("maximal degree must be an even integer >= 2")
    half = _nonneg_ball(n, two_d // 2)
    rows = tuple(
        tuple(2 * c for c in q) for q in map(tuple, half.tolist()) if any(q)
    )
    return VertexList(n=n, two_d=two_d, rows=rows)


# rank state: pair of parallel tuples (reduced pivot rows, pivot columns),
# grown by appending only, so child states share the parent's structure
_EMPTY_STATE: tuple[tuple, tuple] = ((), ())


def _try_reduce(state: tuple[tuple, tuple], vec: Sequence[int]):
    """Reduce vec against the pivot rows (fraction-free cross-multiples).
    Returns the extended state when vec is independent, else None."""
    basis, pivots = state
    v = list(vec)
    for row, c in zip(basis, pivots):
        vc = v[c]
        if vc:
            rc = row[c]
            v = [rc * x - vc * y for x, y in zip(v, row)]
    for c, x in enumerate(v):
        if x:
            return basis + (tuple(v),), pivots + (c,)
    return None


def _iter_full_rank_sets(
    rows: Sequence[Point], n: int, partition: int | None = None
) -> Iterator[tuple[int, ...]]:
    """Yield, in lex order, every strictly increasing n-tuple of row indices
    whose rows are linearly independent.  With partition set, only tuples
    whose first index equals it."""
    m = len(rows)
    sel: list[int] = []
    states: list[tuple[tuple, tuple]] = [_EMPTY_STATE]
    cursor = partition if partition is not None else 0
    while True:
        depth = len(sel)
        if partition is not None and depth == 0:
            limit = partition + 1
        else:
            limit = m - (n - depth) + 1
        descended = False
        while cursor < limit:
            nxt = _try_reduce(states[-1], rows[cursor])
            if nxt is None:
                cursor += 1
                continue
            if depth + 1 == n:
                yield tuple(sel) + (cursor,)
                cursor += 1
                continue
            sel.append(cursor)
            states.append(nxt)
            cursor += 1
            descended = True
            break
        if descended:
            continue
        if not sel:
            return
        cursor = sel.pop() + 1
        states.pop()


def enumerate_simplices(
    n: int, two_d: int, partition: int | None = None
) -> Iterator[SimplicialSet]:
    """Stream every full-dimensional simplex {0} cup {n rows of the vertex
    list}, each exactly once, in lex order of index sets.  Partition streams
    (one per first-row index) are disjoint and jointly exhaustive."""
    V = vertex_list(n, two_d)
    rows = V.rows
    if partition is not None and not (0 <= partition < len(rows)):
        raise ValueError(f"partition {partition} out of range")
    origin = (0,) * n
    for idx in _iter_full_rank_sets(rows, n, partition):
        pts = (origin,) + tuple(rows[i] for i in idx)
        # rows are lex-sorted and nonzero, so pts is sorted with origin first
        yield SimplicialSet(pts)


def _combination_successor(indices: list[int], m: int) -> list[int] | None:
    n = len(indices)
    for j in range(n - 1, -1, -1):
        if indices[j] < m - (n - j):
            indices[j] += 1
            for t in range(j + 1, n):
                indices[t] = indices[t - 1] + 1
            return indices
    return None


def _advance_at(indices: list[int], j: int, m: int) -> list[int] | None:
    """Smallest index set greater than the current one that differs at or
    before position j (used to skip all extensions of a bad prefix)."""
    n = len(indices)
    while j >= 0:
        if indices[j] < m - (n - j):
            indices[j] += 1
            for t in range(j + 1, n):
                indices[t] = indices[t - 1] + 1
            return indices
        j -= 1
    return None


def lex_next_full_rank(
    V: VertexList, indices: Sequence[int]
) -> tuple[int, ...] | None:
    """The lex-smallest full-rank n-index set strictly after ``indices``
    (0-based), or None when none remains.  Stateless: each call replays the
    prefix rank checks, skipping every extension of a rank-deficient prefix.
    """
    rows = V.rows
    m = len(rows)
    n = V.n
    idx = [int(i) for i in indices]
    if len(idx) != n:
        raise ValueError(f"index set must have {n} entries")
    if any(b <= a for a, b in zip(idx, idx[1:])) or idx[0] < 0 or idx[-1] >= m:
        raise ValueError("index set must be strictly increasing and in range")
    J = _combination_successor(idx, m)
    while J is not None:
        state = _EMPTY_STATE
        deficient_at = None
        for j in range(n):
            nxt = _try_reduce(state, rows[J[j]])
            if nxt is None:
                deficient_at = j
                break
            state = nxt
        if deficient_at is None:
            return tuple(J)
        J = _advance_at(J, deficient_at, m)
    return None
