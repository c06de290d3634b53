"""
lattice.py – Integer lattices in column Hermite normal form
===========================================================

A lattice in Z^dim is stored as a tuple of column vectors. ``hnf`` returns
the canonical basis computed by sympy's ``hermite_normal_form``: pivots are
taken from the bottom row upwards and placed in the rightmost columns,
pivots are positive, and every entry to the right of a pivot is reduced
into [0, pivot). Equal lattices therefore have identical bases, including
rank-deficient ones. Everything else here (kernels, intersections,
preimages, membership) is built on that one normal form.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form

log = logging.getLogger(__name__)

Column = Tuple[int, ...]
Basis = Tuple[Column, ...]


# ------------------------------------------------------------
# NORMAL FORM
# ------------------------------------------------------------
def hnf(columns: Iterable[Sequence[int]], dim: int) -> Basis:
    """Canonical Z-basis (as columns) of the span of ``columns`` in Z^dim."""
    cols = [tuple(int(v) for v in c) for c in columns]
    for c in cols:
        if len(c) != dim:
            raise ValueError(f"column {c} does not have length {dim}")
    cols = [c for c in cols if any(c)]
    if not cols or dim == 0:
        return ()
    rows = [[ZZ(c[i]) for c in cols] for i in range(dim)]
    H = hermite_normal_form(DomainMatrix(rows, (dim, len(cols)), ZZ))
    ncols = H.shape[1]
    if ncols == 0:
        return ()
    entries = H.to_Matrix().tolist()
    return tuple(tuple(int(entries[i][j]) for i in range(dim)) for j in range(ncols))


def pivot_row(col: Column) -> int:
    """Index of the lowest nonzero entry of a column."""
    for i in range(len(col) - 1, -1, -1):
        if col[i]:
            return i
    raise ValueError("zero column has no pivot")


# ------------------------------------------------------------
# MEMBERSHIP
# ------------------------------------------------------------
def solve(basis: Basis, v: Sequence[int]) -> Optional[List[int]]:
    """Integer coefficients expressing v in the basis, or None.

    Works on any basis in the echelon shape produced by ``hnf``.
    """
    residual = [int(x) for x in v]
    coeffs = [0] * len(basis)
    for j in range(len(basis) - 1, -1, -1):
        col = basis[j]
        p = pivot_row(col)
        q, r = divmod(residual[p], col[p])
        if r:
            return None
        if q:
            coeffs[j] = q
            residual = [ri - q * ci for ri, ci in zip(residual, col)]
    if any(residual):
        return None
    return coeffs


def contains(basis: Basis, v: Sequence[int]) -> bool:
    return solve(basis, v) is not None


def is_sublattice(inner: Basis, outer: Basis) -> bool:
    return all(contains(outer, c) for c in inner)


# ------------------------------------------------------------
# LINEAR ALGEBRA OVER Z
# ------------------------------------------------------------
def apply(phi: Sequence[Column], w: Sequence[int]) -> Column:
    """phi given by the images of unit vectors (columns); returns phi(w)."""
    if not phi:
        return ()
    dim = len(phi[0])
    out = [0] * dim
    for coeff, col in zip(w, phi):
        if coeff:
            for i in range(dim):
                out[i] += coeff * col[i]
    return tuple(out)


def kernel(rows: Sequence[Sequence[int]], ncols: int) -> Basis:
    """Z-basis of {w in Z^ncols : rows · w = 0}.

    The HNF of the stacked matrix [I ; A] pushes the A-pivots into the
    rightmost columns; the remaining columns vanish on the A rows and their
    top blocks span the kernel.
    """
    if ncols == 0:
        return ()
    m = len(rows)
    if m == 0:
        return tuple(tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols))
    stacked = []
    for j in range(ncols):
        top = [1 if i == j else 0 for i in range(ncols)]
        stacked.append(tuple(top + [int(rows[r][j]) for r in range(m)]))
    H = hnf(stacked, ncols + m)
    return tuple(col[:ncols] for col in H if not any(col[ncols:]))


def intersect(B1: Basis, B2: Basis, dim: int) -> Basis:
    """HNF basis of L(B1) ∩ L(B2)."""
    if not B1 or not B2:
        return ()
    k1 = len(B1)
    rows = [[c[i] for c in B1] + [-c[i] for c in B2] for i in range(dim)]
    vectors = [apply(B1, w[:k1]) for w in kernel(rows, k1 + len(B2))]
    return hnf(vectors, dim)


def preimage(phi: Sequence[Column], target: Basis, source_dim: int) -> Basis:
    """HNF basis of {w in Z^source_dim : phi(w) in L(target)}."""
    if len(phi) != source_dim:
        raise ValueError("phi must have one column per source coordinate")
    if not phi:
        return ()
    dim = len(phi[0])
    rows = [[c[i] for c in phi] + [-c[i] for c in target] for i in range(dim)]
    return hnf((w[:source_dim] for w in kernel(rows, source_dim + len(target))), source_dim)


def span_saturation(basis: Basis, span: Sequence[Column], dim: int) -> Basis:
    """HNF basis of L(basis) ∩ Q·span."""
    if not basis:
        return ()
    spanning = [c for c in span if any(c)]
    if not spanning:
        return ()
    normals = kernel([list(c) for c in spanning], dim)
    if not normals:
        return hnf(basis, dim)
    rows = [[sum(n[i] * c[i] for i in range(dim)) for c in basis] for n in normals]
    return hnf((apply(basis, w) for w in kernel(rows, len(basis))), dim)


def determinant(basis: Basis, dim: int) -> int:
    """Index [Z^dim : L] of a full-rank HNF basis (product of the pivots)."""
    if len(basis) != dim:
        raise ValueError(f"lattice has rank {len(basis)}, not {dim}")
    det = 1
    for col in basis:
        det *= col[pivot_row(col)]
    return abs(det)


def scale(basis: Basis, k: int, dim: int) -> Basis:
    return hnf((tuple(k * v for v in c) for c in basis), dim)


def block_diagonal(blocks: Sequence[Sequence[Sequence[int]]]) -> List[List[int]]:
    """Square block-diagonal matrix (as rows) from square blocks (as rows)."""
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    offset = 0
    for b in blocks:
        n = len(b)
        for i in range(n):
            for j in range(n):
                out[offset + i][offset + j] = int(b[i][j])
        offset += n
    return out


def matrix_columns(rows: Sequence[Sequence[int]]) -> Tuple[Column, ...]:
    if not rows:
        return ()
    return tuple(tuple(int(r[j]) for r in rows) for j in range(len(rows[0])))


def mat_vec(rows: Sequence[Sequence[int]], v: Sequence[int]) -> Column:
    return tuple(sum(int(a) * int(b) for a, b in zip(r, v)) for r in rows)
