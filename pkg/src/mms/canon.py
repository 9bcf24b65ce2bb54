"""Lattice canonicalization: Hermite normal form up to column permutation.

The lattice of a full-dimensional simplex {0, v_1..v_n} is the row span of
the matrix whose columns are the nonzero vertices.  Unimodular maps of the
simplex change that matrix by left multiplication (same row span) and vertex
reordering permutes columns, so the canonical key is the minimal HNF over
all column permutations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from .geometry import Point, SimplicialSet

Matrix = tuple[tuple[int, ...], ...]


def transpose(m: Matrix) -> Matrix:
    if not m:
        return ()
    return tuple(zip(*m))


def generator_matrix(delta: SimplicialSet) -> Matrix:
    """Matrix whose rows generate the simplex lattice: columns are the
    nonzero vertices in lex order.  The lattice depends on which vertex
    sits at the origin, so an existing origin vertex is kept as the anchor;
    a set without one is translated by its lex-minimal vertex first."""
    pts = delta.points
    zero = (0,) * delta.ambient_dim
    if zero in pts:
        others = tuple(p for p in pts if p != zero)
    else:
        base = pts[0]
        # translation preserves lex order, so the order of the rest survives
        others = tuple(tuple(a - b for a, b in zip(p, base)) for p in pts[1:])
    n = delta.ambient_dim
    return tuple(tuple(v[i] for v in others) for i in range(n))


def hnf(m: Matrix) -> Matrix:
    """Row-style Hermite normal form: H = U*M with U unimodular, pivots
    positive, entries below a pivot zero and entries above it reduced into
    [0, pivot).  Rank-deficient inputs end with zero rows.
    """
    rows = [list(r) for r in m]
    if not rows:
        return ()
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        if r == len(rows):
            break
        # gcd loop: repeatedly reduce entries in this column below row r
        while True:
            piv = None
            for i in range(r, len(rows)):
                if rows[i][col] != 0 and (piv is None or abs(rows[i][col]) < abs(rows[piv][col])):
                    piv = i
            if piv is None:
                break
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][col] != 0:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    if rows[i][col] != 0:
                        done = False
            if done:
                break
        if rows[r][col] == 0:
            continue
        if rows[r][col] < 0:
            rows[r] = [-a for a in rows[r]]
        for i in range(r):
            q = rows[i][col] // rows[r][col]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return tuple(tuple(row) for row in rows)


def matrix_determinant(m: Matrix) -> int:
    """Exact determinant of a square integer matrix (fraction-free Gauss
    with final division, Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("determinant requires a square matrix")
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def serialize_matrix(m: Matrix) -> str:
    """Fixed-width decimal text form: "RxCwW:" then rows separated by ";",
    entries by ",", each zero-padded to width W.  Bit-exact and diffable."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    width = 1
    for row in m:
        for e in row:
            width = max(width, len(str(e)))
    body = ";".join(",".join(f"{e:0{width}d}" for e in row) for row in m)
    return f"{rows}x{cols}w{width}:{body}"


@dataclass(frozen=True)
class CanonicalLatticeKey:
    hnf: Matrix
    key_bytes: bytes

    @property
    def key_text(self) -> str:
        return self.key_bytes.decode("ascii")


def _column_gcds(m: Matrix) -> list[int]:
    cols = transpose(m)
    out = []
    for col in cols:
        g = 0
        for e in col:
            g = gcd(g, e)
        out.append(g)
    return out


def hnf_orbit(m: Matrix) -> list[Matrix]:
    """All distinct HNFs of column permutations of m, sorted by their
    serialized form.  This is the complete set of plain HNFs occurring in
    the equivalence class of the lattice, which is what makes it usable as
    a lookup table; the first entry is the canonical representative."""
    cols = transpose(m)
    seen = {hnf(transpose(perm)) for perm in itertools.permutations(cols)}
    return sorted(seen, key=serialize_matrix)


def canonical_key_of_matrix(m: Matrix) -> CanonicalLatticeKey:
    """Minimal serialized HNF over all column permutations of a generator
    matrix.  The minimum is taken in the serialized text order, so it is
    exactly the smallest key that can name this lattice class."""
    if not m or not m[0]:
        raise ValueError("empty matrix has no canonical key")
    best = hnf_orbit(m)[0]
    return CanonicalLatticeKey(hnf=best, key_bytes=serialize_matrix(best).encode("ascii"))


def canonical_key(delta: SimplicialSet) -> CanonicalLatticeKey:
    """Canonical key of a full-dimensional simplex's lattice.  Two simplices
    get equal keys iff their lattices agree up to a coordinate permutation,
    i.e. iff one simplex is the image of the other under a unimodular map
    plus even translation."""
    if delta.simplex_dim != delta.ambient_dim:
        raise ValueError("canonical key requires a full-dimensional simplex")
    return canonical_key_of_matrix(generator_matrix(delta))


def equivalent(d1: SimplicialSet, d2: SimplicialSet) -> bool:
    """Whether two full-dimensional simplices have the same lattice up to
    coordinate permutation.  Cheap invariants (|det| = lattice index, column
    gcd multiset) filter before the permutation search."""
    if d1.ambient_dim != d2.ambient_dim:
        raise ValueError("dimension mismatch")
    if d1.simplex_dim != d1.ambient_dim or d2.simplex_dim != d2.ambient_dim:
        raise ValueError("equivalence requires full-dimensional simplices")
    g1 = generator_matrix(d1)
    g2 = generator_matrix(d2)
    if abs(matrix_determinant(g1)) != abs(matrix_determinant(g2)):
        return False
    if sorted(_column_gcds(g1)) != sorted(_column_gcds(g2)):
        return False
    return canonical_key_of_matrix(g1).key_bytes == canonical_key_of_matrix(g2).key_bytes
