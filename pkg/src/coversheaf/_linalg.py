"""Exact rank and null-space routines for small integer matrices.

Coboundary and incidence matrices in this package have entries in
{-1, 0, 1}, so ranks can be certified exactly with integer row
operations instead of floating-point thresholds.  A floating SVD rank
is kept as an independent cross-check route; verdicts that feed
acceptance checks always use the exact route.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np


def _to_rows(matrix) -> list[dict[int, int]]:
    """Convert a dense array-like of integers into sparse row dicts."""
    a = np.asarray(matrix)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    rows = []
    for r in range(a.shape[0]):
        row = {int(c): int(a[r, c]) for c in np.nonzero(a[r])[0]}
        if row:
            rows.append(row)
    return rows


def _row_gcd(row: dict[int, int]) -> int:
    g = 0
    for v in row.values():
        g = gcd(g, abs(v))
        if g == 1:
            break
    return g


def exact_rank(matrix) -> int:
    """Rank over the rationals, computed by integer elimination.

    Rows are kept as sparse dicts; pivots prefer entries of magnitude 1
    so that the update ``row*p - pivot*v`` stays integral with small
    entries.  Rows are re-normalized by their gcd, which bounds growth
    on the selection-pattern matrices used here.
    """
    rows = _to_rows(matrix)
    rank = 0
    while rows:
        rows.sort(key=len)
        pivot = rows.pop(0)
        pcol, pval = min(pivot.items(), key=lambda kv: (abs(kv[1]), kv[0]))
        rank += 1
        updated = []
        for row in rows:
            v = row.get(pcol)
            if v is None:
                updated.append(row)
                continue
            g = gcd(pval, v)
            a, b = pval // g, v // g
            merged = {c: val * a for c, val in row.items()}
            for c, val in pivot.items():
                nv = merged.get(c, 0) - val * b
                if nv:
                    merged[c] = nv
                elif c in merged:
                    del merged[c]
            if merged:
                rg = _row_gcd(merged)
                if rg > 1:
                    merged = {c: val // rg for c, val in merged.items()}
                updated.append(merged)
        rows = updated
    return rank


def float_rank(matrix, tol: float = 1e-9) -> int:
    """Rank estimate from singular values above ``tol``."""
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol))


def fraction_rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals.

    Returns the reduced rows and the list of pivot column indices.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def nullspace_basis(matrix) -> list[list[Fraction]]:
    """Exact rational basis of the right null space of an integer matrix."""
    a = np.asarray(matrix)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    nrows, ncols = a.shape
    if ncols == 0:
        return []
    rows = [[Fraction(int(a[r, c])) for c in range(ncols)] for r in range(nrows)]
    rref, pivots = fraction_rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -rref[r][f]
        basis.append(vec)
    return basis
