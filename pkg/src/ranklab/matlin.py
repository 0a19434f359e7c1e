"""Dense exact linear algebra over finite field handles.

A matrix is a 2-D numpy array of element codes together with the
:class:`~ranklab.galois.FiniteField` that owns the codes; all functions here
take the field as their first argument and never mutate their inputs.
Includes maximal-minor (Pluecker coordinate) extraction, the subset
rank/unrank bijection used to label minor variables, and the expansion of
extension-field vectors into coordinate matrices over the base field.

Row reduction has two interchangeable backends: a generic table-driven one
for any field and a bit-packed one for GF(2); ``echelonize`` picks the
packed path automatically for binary fields (behaviour is identical and is
cross-checked in the test suite).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .galois import FiniteField

__all__ = [
    "EchelonResult",
    "echelonize",
    "right_kernel",
    "solve_right",
    "matmul",
    "matrix_from_rows",
    "determinant",
    "maximal_minors",
    "subset_rank",
    "subset_unrank",
    "all_subsets",
    "mat_of",
    "vec_of",
    "rank_weight",
    "random_full_rank",
    "random_invertible",
    "identity",
    "dump_triplets",
]


@dataclass(frozen=True)
class EchelonResult:
    """Reduced row-echelon data: rank, RREF array, pivot columns, right kernel.

    ``kernel`` rows form a basis of {v : M v^T = 0}; it has
    ``ncols - rank`` rows (possibly zero).
    """

    rank: int
    rref: np.ndarray
    pivots: Tuple[int, ...]
    kernel: np.ndarray


def matrix_from_rows(rows: Sequence[Sequence[int]]) -> np.ndarray:
    return np.array(rows, dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(fld: FiniteField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over the field; a is (r x n), b is (n x c)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for t in range(a.shape[1]):
        col = a[:, t]
        if not col.any():
            continue
        out = fld.add_arr(out, fld.mul_outer(col, b[t]))
    return out


# ---------------------------------------------------------------------------
# row reduction
# ---------------------------------------------------------------------------

def _rref_generic(fld: FiniteField, mat: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    a = np.array(mat, dtype=np.int64)
    nrows, ncols = a.shape
    pivots: List[int] = []
    rr = 0
    for c in range(ncols):
        if rr == nrows:
            break
        nz = np.nonzero(a[rr:, c])[0]
        if nz.size == 0:
            continue
        pr = rr + int(nz[0])
        if pr != rr:
            a[[rr, pr]] = a[[pr, rr]]
        pv = int(a[rr, c])
        if pv != 1:
            a[rr] = fld.mul_arr(a[rr], fld.inv(pv))
        f = a[:, c].copy()
        f[rr] = 0
        mask = f != 0
        if mask.any():
            a[mask] = fld.sub_arr(a[mask], fld.mul_outer(f[mask], a[rr]))
        pivots.append(c)
        rr += 1
    return a, pivots


def _rref_gf2_packed(mat: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Bit-packed GF(2) reduction; rows live in uint64 words."""
    nrows, ncols = mat.shape
    nwords = (ncols + 63) // 64
    packed = np.zeros((nrows, nwords), dtype=np.uint64)
    for w in range(nwords):
        chunk = mat[:, 64 * w: 64 * (w + 1)].astype(np.uint64)
        for b in range(chunk.shape[1]):
            packed[:, w] |= chunk[:, b] << np.uint64(b)
    pivots: List[int] = []
    rr = 0
    for c in range(ncols):
        if rr == nrows:
            break
        w, b = divmod(c, 64)
        bits = (packed[:, w] >> np.uint64(b)) & np.uint64(1)
        nz = np.nonzero(bits[rr:])[0]
        if nz.size == 0:
            continue
        pr = rr + int(nz[0])
        if pr != rr:
            packed[[rr, pr]] = packed[[pr, rr]]
        bits = (packed[:, w] >> np.uint64(b)) & np.uint64(1)
        bits[rr] = 0
        mask = bits.astype(bool)
        if mask.any():
            packed[mask] ^= packed[rr]
        pivots.append(c)
        rr += 1
    out = np.zeros((nrows, ncols), dtype=np.int64)
    for w in range(nwords):
        width = min(64, ncols - 64 * w)
        for b in range(width):
            out[:, 64 * w + b] = ((packed[:, w] >> np.uint64(b)) & np.uint64(1)).astype(np.int64)
    return out, pivots


def echelonize(fld: FiniteField, mat: np.ndarray, force_generic: bool = False) -> EchelonResult:
    """RREF with rank, pivot columns and a right-kernel basis."""
    mat = np.asarray(mat, dtype=np.int64)
    if mat.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if fld.order == 2 and not force_generic:
        rref, pivots = _rref_gf2_packed(mat)
    else:
        rref, pivots = _rref_generic(fld, mat)
    kernel = _kernel_from_rref(fld, rref, pivots)
    return EchelonResult(len(pivots), rref, tuple(pivots), kernel)


def _kernel_from_rref(fld: FiniteField, rref: np.ndarray, pivots: Sequence[int]) -> np.ndarray:
    ncols = rref.shape[1]
    piv_set = set(pivots)
    free = [c for c in range(ncols) if c not in piv_set]
    kernel = np.zeros((len(free), ncols), dtype=np.int64)
    for i, fc in enumerate(free):
        kernel[i, fc] = 1
        for row, pc in enumerate(pivots):
            kernel[i, pc] = fld.neg(int(rref[row, fc]))
    return kernel


def right_kernel(fld: FiniteField, mat: np.ndarray) -> np.ndarray:
    return echelonize(fld, mat).kernel


def solve_right(fld: FiniteField, mat: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
    """One solution v of mat v^T = rhs^T, or None if inconsistent.

    Free coordinates are set to zero, so the answer is deterministic.
    """
    mat = np.asarray(mat, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1)
    aug = np.concatenate([mat, rhs[:, None]], axis=1)
    res = echelonize(fld, aug)
    ncols = mat.shape[1]
    if ncols in res.pivots:
        return None
    v = np.zeros(ncols, dtype=np.int64)
    for row, pc in enumerate(res.pivots):
        v[pc] = res.rref[row, ncols]
    return v


def determinant(fld: FiniteField, mat: np.ndarray) -> int:
    """Exact determinant by Gaussian elimination (no normalization)."""
    a = np.array(mat, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    det = 1
    for c in range(n):
        nz = np.nonzero(a[c:, c])[0]
        if nz.size == 0:
            return 0
        pr = c + int(nz[0])
        if pr != c:
            a[[c, pr]] = a[[pr, c]]
            det = fld.neg(det)
        pv = int(a[c, c])
        det = fld.mul(det, pv)
        below = a[c + 1:, c].copy()
        mask = below != 0
        if mask.any():
            factors = fld.mul_arr(below[mask], fld.inv(pv))
            a[c + 1:][mask] = fld.sub_arr(a[c + 1:][mask], fld.mul_outer(factors, a[c]))
    return det


def random_full_rank(fld: FiniteField, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform rows x cols matrix conditioned on full rank min(rows, cols)."""
    while True:
        m = fld.rand_elements(rng, (rows, cols))
        if echelonize(fld, m).rank == min(rows, cols):
            return m


def random_invertible(fld: FiniteField, n: int, rng: np.random.Generator) -> np.ndarray:
    return random_full_rank(fld, n, n, rng)


# ---------------------------------------------------------------------------
# subset indexing (labels of the minor variables)
# ---------------------------------------------------------------------------

def subset_rank(n: int, subset: Sequence[int]) -> int:
    """Index of a sorted subset of range(n) in lexicographic order.

    The induced total order matches the minor-variable order: a larger index
    means a larger variable, deciding on the first differing element.
    """
    t = tuple(subset)
    r = len(t)
    if any(t[i] >= t[i + 1] for i in range(r - 1)) or (t and not 0 <= t[0] < n) or (t and t[-1] >= n):
        raise ValueError(f"malformed subset {subset!r} of range({n})")
    rank = 0
    prev = -1
    for idx, v in enumerate(t):
        for c in range(prev + 1, v):
            rank += comb(n - 1 - c, r - 1 - idx)
        prev = v
    return rank


def subset_unrank(n: int, r: int, index: int) -> Tuple[int, ...]:
    """Inverse of :func:`subset_rank`."""
    if not 0 <= index < comb(n, r):
        raise ValueError("subset index out of range")
    out: List[int] = []
    prev = -1
    for idx in range(r):
        c = prev + 1
        while True:
            block = comb(n - 1 - c, r - 1 - idx)
            if index < block:
                break
            index -= block
            c += 1
        out.append(c)
        prev = c
    return tuple(out)


def all_subsets(n: int, r: int) -> List[Tuple[int, ...]]:
    """All r-subsets of range(n) in index order (ascending variable order)."""
    return list(itertools.combinations(range(n), r))


# ---------------------------------------------------------------------------
# maximal minors
# ---------------------------------------------------------------------------

_LAPLACE_LIMIT = 6


def maximal_minors(fld: FiniteField, mat: np.ndarray, r: int) -> np.ndarray:
    """All r x r minors of an r x n matrix, indexed by subset order.

    Shares sub-minors across subsets via Laplace expansion for small r,
    falling back to per-subset Gaussian determinants beyond that.
    """
    mat = np.asarray(mat, dtype=np.int64)
    if mat.shape[0] != r:
        raise ValueError("matrix must have exactly r rows")
    n = mat.shape[1]
    if r > n:
        raise ValueError("need at least r columns")
    if r == 0:
        return np.ones(1, dtype=np.int64)
    if r > _LAPLACE_LIMIT:
        return np.array([determinant(fld, mat[:, list(t)]) for t in all_subsets(n, r)],
                        dtype=np.int64)
    minors: Dict[Tuple[int, ...], int] = {(): 1}
    for size in range(1, r + 1):
        nxt: Dict[Tuple[int, ...], int] = {}
        row = size - 1
        for t in itertools.combinations(range(n), size):
            acc = 0
            # expand along the last used row; sign alternates with position
            for pos in range(size - 1, -1, -1):
                entry = int(mat[row, t[pos]])
                if entry:
                    term = fld.mul(entry, minors[t[:pos] + t[pos + 1:]])
                    if (row + pos) % 2:
                        term = fld.neg(term)
                    acc = fld.add(acc, term)
            nxt[t] = acc
        minors = nxt
    return np.array([minors[t] for t in all_subsets(n, r)], dtype=np.int64)


# ---------------------------------------------------------------------------
# coordinate expansion of extension-field vectors
# ---------------------------------------------------------------------------

def mat_of(ext: FiniteField, vec: Sequence[int]) -> np.ndarray:
    """m x n base-field matrix whose column j holds the coordinates of vec[j]."""
    m = ext.degree
    cols = [ext.coeffs(int(x)) for x in vec]
    return np.array(cols, dtype=np.int64).T.reshape(m, len(cols))


def vec_of(ext: FiniteField, mat: np.ndarray) -> np.ndarray:
    """Inverse of :func:`mat_of`."""
    mat = np.asarray(mat, dtype=np.int64)
    return np.array([ext.from_coeffs(mat[:, j].tolist()) for j in range(mat.shape[1])],
                    dtype=np.int64)


def rank_weight(ext: FiniteField, vec: Sequence[int]) -> int:
    """Rank of the coordinate expansion = dimension of the span of entries."""
    base = ext.base
    if base is None:
        return int(any(int(x) for x in vec))
    return echelonize(base, mat_of(ext, vec)).rank


# ---------------------------------------------------------------------------
# debug dump
# ---------------------------------------------------------------------------

def dump_triplets(mat: np.ndarray, row_labels: Sequence, col_labels: Sequence) -> str:
    """Sparse triplet text (row label, column label, element code) per line."""
    lines = []
    mat = np.asarray(mat)
    for i, j in zip(*np.nonzero(mat)):
        lines.append(f"{row_labels[int(i)]}\t{col_labels[int(j)]}\t{int(mat[i, j])}")
    return "\n".join(lines) + ("\n" if lines else "")
