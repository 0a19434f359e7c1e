"""Algebraic systems attached to an RD or MinRank instance.

Five systems are constructed here, all sharing the minor variables c_T
(Pluecker coordinates of the row space of the unknown support matrix,
indexed by r-subsets T of column positions):

* ``build_mm_fqm``: linear equations over F_{q^m} in the c_T from the
  vanishing maximal minors of C . H_y^T (one per r-subset J of the
  extended parity check rows).
* ``build_mm_fq``: its unfolding into m times as many F_q equations.
* ``build_sm_fqm``: affine bilinear equations over F_{q^m} in the k linear
  variables x and the c_T, from the maximal minors of (x G + y ; C).
* ``build_sm_fq``: the unfolded bilinear system over F_q in k m coordinate
  variables (coincides with the direct minor construction on the expanded
  MinRank instance; the equality is a test oracle).
* ``reduce_sm_plus``: the compact system obtained by eliminating c_T
  variables from the high-overlap bilinear equations using the linear ones.

Monomials are ordered graded reverse-lexicographically with the minor
variables below all linear variables: total degree first, then the minor
variable (larger subset index larger), then the x-part as exponent vectors
with the first variable largest.  The order is multiplicative, so leading
terms behave under multipliers; it fixes the Macaulay column layout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .galois import FiniteField
from . import matlin as ml
from .instances import CanonicalRd, MinRankInstance, rd_to_minrank

__all__ = [
    "CtLinearSystem",
    "BilinearSystem",
    "QPartition",
    "SmPlusSystem",
    "MacaulayMatrix",
    "MaxMinorsSolvable",
    "MonomialBudgetError",
    "build_mm_fqm",
    "build_mm_fq",
    "build_sm_fqm",
    "build_sm_fq",
    "sm_for_minrank",
    "sm_fq_direct",
    "reduce_sm_plus",
    "macaulay",
    "basis_bb",
    "monomial_key",
    "leading_term",
    "subsystem",
]


class MaxMinorsSolvable(Exception):
    """The linear system alone pins the minors; no bilinear stage needed."""


class MonomialBudgetError(Exception):
    """Macaulay matrix would exceed the configured cell budget."""


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CtLinearSystem:
    """Rows of linear equations in the minor variables c_T."""

    field: FiniteField
    n: int
    r: int
    coeffs: np.ndarray           # (#rows, C(n, r))
    tag: str                     # "mm-fqm" | "mm-fq"
    row_labels: Tuple = ()

    @property
    def nrows(self) -> int:
        return self.coeffs.shape[0]


@dataclass(frozen=True)
class BilinearSystem:
    """Affine bilinear polynomials sum_{j,T} B[p,j,T] x_j c_T + sum_T A[p,T] c_T.

    ``subsets`` lists the active c_T labels for the coefficient columns;
    after elimination it shrinks to the free minors.
    """

    field: FiniteField
    nx: int
    n: int
    r: int
    subsets: Tuple[Tuple[int, ...], ...]
    bil: np.ndarray              # (#polys, nx, #subsets)
    aff: np.ndarray              # (#polys, #subsets)
    labels: Tuple                 # per-poly label: subset I, or (I, i)
    tag: str

    @property
    def npolys(self) -> int:
        return self.bil.shape[0]

    def eval_at(self, x: Sequence[int], ct: Sequence[int]) -> np.ndarray:
        """Evaluate every polynomial; x and ct are code vectors."""
        fld = self.field
        ct = np.asarray(ct, dtype=np.int64)
        out = []
        for p in range(self.npolys):
            acc = 0
            for v in fld.mul_arr(self.aff[p], ct):
                acc = fld.add(acc, int(v))
            for j, xj in enumerate(x):
                if xj:
                    row = fld.mul_arr(self.bil[p, j], ct)
                    for v in row:
                        acc = fld.add(acc, fld.mul(int(xj), int(v)))
            out.append(acc)
        return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class QPartition:
    """Indices of the bilinear equations by overlap with the first k+1 columns."""

    zero: Tuple[int, ...]
    one: Tuple[int, ...]
    two_plus: Tuple[int, ...]


@dataclass(frozen=True)
class SmPlusSystem:
    """High-overlap bilinear equations with pivot minors eliminated.

    ``system`` has the free minors as columns; ``pivot_cols`` lists the
    eliminated c_T (largest first in the variable order), and ``pivot_expr``
    writes each of them as an F_q-combination of the free ones for
    back-substitution.
    """

    system: BilinearSystem
    free_cols: Tuple[int, ...]        # indices into the full subset list
    pivot_cols: Tuple[int, ...]
    pivot_expr: np.ndarray            # (#pivots, #free) over F_q
    mm_rank: int
    k: int


# ---------------------------------------------------------------------------
# MaxMinors systems
# ---------------------------------------------------------------------------

def build_mm_fqm(can: CanonicalRd) -> CtLinearSystem:
    """Linear system over F_{q^m}: row J holds the minors of H_y rows J.

    The coefficient of c_T in row J is the (J, T) minor of the extended
    parity check, so the leading coefficient (at T = J shifted past the
    systematic block) is 1 and the planted minors vanish on every row.
    """
    fld = can.field
    n, k, r = can.n, can.k, can.r
    js = ml.all_subsets(n - k - 1, r)
    rows = np.zeros((len(js), comb(n, r)), dtype=np.int64)
    for idx, j_rows in enumerate(js):
        rows[idx] = ml.maximal_minors(fld, can.h_y[list(j_rows)], r)
    return CtLinearSystem(fld, n, r, rows, "mm-fqm", tuple(js))


def build_mm_fq(mm: CtLinearSystem) -> CtLinearSystem:
    """Unfold an F_{q^m} linear system into m times as many F_q rows."""
    fld = mm.field
    duals = fld.dual_basis()
    out = np.zeros((mm.nrows * len(duals), mm.coeffs.shape[1]), dtype=np.int64)
    labels = []
    for p in range(mm.nrows):
        for i, bs in enumerate(duals):
            out[p * len(duals) + i] = fld.trace_arr(fld.mul_arr(bs, mm.coeffs[p]))
            labels.append((mm.row_labels[p] if mm.row_labels else p, i))
    return CtLinearSystem(fld.base, mm.n, mm.r, out, "mm-fq", tuple(labels))


# ---------------------------------------------------------------------------
# Support-Minors systems
# ---------------------------------------------------------------------------

def build_sm_fqm(can: CanonicalRd) -> Tuple[BilinearSystem, QPartition]:
    """Bilinear system over F_{q^m} from the minors of (x G + y ; C).

    Laplace expansion along the first row turns the minor at columns I
    into a signed sum over i in I of (x G + y)_i c_{I minus i}.
    """
    fld = can.field
    n, k, r = can.n, can.k, can.r
    subsets = tuple(ml.all_subsets(n, r))
    i_sets = ml.all_subsets(n, r + 1)
    bil = np.zeros((len(i_sets), k, len(subsets)), dtype=np.int64)
    aff = np.zeros((len(i_sets), len(subsets)), dtype=np.int64)
    for p, i_set in enumerate(i_sets):
        for pos, col in enumerate(i_set):
            t = i_set[:pos] + i_set[pos + 1:]
            tidx = ml.subset_rank(n, t)
            gcol = can.gen[:, col]
            ycol = int(can.received[col])
            if pos % 2:
                gcol = fld.neg_arr(gcol)
                ycol = fld.neg(ycol)
            bil[p, :, tidx] = fld.add_arr(bil[p, :, tidx], gcol)
            aff[p, tidx] = fld.add(int(aff[p, tidx]), ycol)
    sys = BilinearSystem(fld, k, n, r, subsets, bil, aff, tuple(i_sets), "sm-fqm")
    return sys, q_partition(sys, k)


def q_partition(sys: BilinearSystem, k: int) -> QPartition:
    zero, one, two = [], [], []
    for p, i_set in enumerate(sys.labels):
        s = sum(1 for v in i_set if v <= k)
        (zero if s == 0 else one if s == 1 else two).append(p)
    return QPartition(tuple(zero), tuple(one), tuple(two))


def build_sm_fq(sm: BilinearSystem) -> BilinearSystem:
    """Unfold the extension-field bilinear system into F_q coordinates.

    Linear variable (j, l) -> j m + l is the coefficient of basis element l
    in x_j; polynomial (I, i) applies the i-th coordinate extraction.
    """
    fld = sm.field
    base = fld.base
    m = fld.degree
    duals = fld.dual_basis()
    basis = fld.basis
    P, k, nt = sm.bil.shape
    bil = np.zeros((P * m, k * m, nt), dtype=np.int64)
    aff = np.zeros((P * m, nt), dtype=np.int64)
    labels = []
    for i, bs in enumerate(duals):
        aff_i = fld.trace_arr(fld.mul_arr(bs, sm.aff))
        aff[i::m] = aff_i
        for ell, bl in enumerate(basis):
            coef = fld.mul(bs, bl)
            tm = fld.trace_arr(fld.mul_arr(coef, sm.bil))   # (P, k, nt)
            bil[i::m, ell::m, :] = tm
    for p in range(P):
        for i in range(m):
            labels.append((sm.labels[p], i))
    return BilinearSystem(base, k * m, sm.n, sm.r, sm.subsets, bil, aff,
                          tuple(labels), "sm-fq")


def sm_for_minrank(inst: MinRankInstance) -> BilinearSystem:
    """Generic bilinear modeling of a MinRank instance over F_q.

    Each row of M_0 + sum x_u M_u stacked on the support matrix gives one
    minor per (r+1)-subset of columns, expanded along that affine row.
    """
    fld = inst.field
    n, r, K, m = inst.n, inst.r, inst.K, inst.m
    subsets = tuple(ml.all_subsets(n, r))
    i_sets = ml.all_subsets(n, r + 1)
    bil = np.zeros((len(i_sets) * m, K, len(subsets)), dtype=np.int64)
    aff = np.zeros((len(i_sets) * m, len(subsets)), dtype=np.int64)
    labels = []
    mats = np.stack(inst.mats)         # (K+1, m, n)
    for p, i_set in enumerate(i_sets):
        for i in range(m):
            row = p * m + i
            labels.append((i_set, i))
            for pos, col in enumerate(i_set):
                t = i_set[:pos] + i_set[pos + 1:]
                tidx = ml.subset_rank(n, t)
                vals = mats[:, i, col]
                if pos % 2:
                    vals = fld.neg_arr(vals)
                aff[row, tidx] = fld.add(int(aff[row, tidx]), int(vals[0]))
                bil[row, :, tidx] = fld.add_arr(bil[row, :, tidx], vals[1:])
    return BilinearSystem(fld, K, n, r, subsets, bil, aff, tuple(labels), "sm-minrank")


def sm_fq_direct(can: CanonicalRd) -> BilinearSystem:
    """Independent construction of the unfolded system via the MinRank view.

    Builds the coordinate-matrix expansion of the instance and applies the
    generic MinRank modeling; coefficientwise equality with
    :func:`build_sm_fq` is the cross-construction oracle.  Row and variable
    orders match the unfolding conventions, so the comparison is direct.
    """
    from .instances import RdInstance

    rd = RdInstance(can.field, can.n, can.k, can.r, can.gen, can.received, None)
    sys = sm_for_minrank(rd_to_minrank(rd))
    return BilinearSystem(sys.field, sys.nx, sys.n, sys.r, sys.subsets,
                          sys.bil, sys.aff, sys.labels, "sm-fq-direct")


def subsystem(sys: BilinearSystem, indices: Sequence[int]) -> BilinearSystem:
    idx = list(indices)
    return BilinearSystem(sys.field, sys.nx, sys.n, sys.r, sys.subsets,
                          sys.bil[idx], sys.aff[idx],
                          tuple(sys.labels[i] for i in idx), sys.tag)


# ---------------------------------------------------------------------------
# elimination of minors by the linear system
# ---------------------------------------------------------------------------

def reduce_sm_plus(sm: BilinearSystem, part: QPartition, mm_fq: CtLinearSystem,
                   k: int, force: bool = False) -> SmPlusSystem:
    """Eliminate pivot minors from the high-overlap equations.

    Pivots are chosen greedily on the largest c_T in the variable order,
    matching normal-form semantics.  Raises :class:`MaxMinorsSolvable`
    when the linear system already determines the minors projectively
    (``force`` still performs the reduction then, for structural checks
    on overdetermined instances).
    """
    base = mm_fq.field
    nt = mm_fq.coeffs.shape[1]
    rev = mm_fq.coeffs[:, ::-1]
    res = ml.echelonize(base, rev)
    if res.rank >= nt - 1 and not force:
        raise MaxMinorsSolvable(f"linear minor system has rank {res.rank} of {nt}")
    pivot_cols = tuple(nt - 1 - p for p in res.pivots)          # descending c_T
    free_cols = tuple(c for c in range(nt) if c not in set(pivot_cols))
    # c_pivot = - sum over free of rref coefficient * c_free
    expr = np.zeros((len(pivot_cols), len(free_cols)), dtype=np.int64)
    free_rev = {nt - 1 - c: i for i, c in enumerate(free_cols)}
    for row, p in enumerate(res.pivots):
        for c in np.nonzero(res.rref[row])[0]:
            c = int(c)
            if c == p:
                continue
            expr[row, free_rev[c]] = base.neg(int(res.rref[row, c]))
    reduced = _substitute(sm, part.two_plus, free_cols, pivot_cols, expr)
    return SmPlusSystem(reduced, free_cols, pivot_cols, expr, res.rank, k)


def _substitute(sm: BilinearSystem, rows: Sequence[int], free_cols: Sequence[int],
                pivot_cols: Sequence[int], expr: np.ndarray) -> BilinearSystem:
    fld = sm.field
    idx = list(rows)
    free = list(free_cols)
    piv = list(pivot_cols)
    nb = sm.bil[idx]
    na = sm.aff[idx]
    P, k, _ = nb.shape
    flat = nb.reshape(P * k, -1)
    new_bil = fld.add_arr(flat[:, free], ml.matmul(fld, flat[:, piv], expr))
    new_aff = fld.add_arr(na[:, free], ml.matmul(fld, na[:, piv], expr))
    subsets = tuple(sm.subsets[c] for c in free)
    return BilinearSystem(fld, sm.nx, sm.n, sm.r, subsets,
                          new_bil.reshape(P, k, len(free)), new_aff,
                          tuple(sm.labels[i] for i in idx), sm.tag + "+")


def nf_bilinear(plus: SmPlusSystem, sm: BilinearSystem, rows: Sequence[int]) -> BilinearSystem:
    """Normal form of arbitrary bilinear rows under the recorded elimination."""
    return _substitute(sm, rows, plus.free_cols, plus.pivot_cols, plus.pivot_expr)


# ---------------------------------------------------------------------------
# monomial order, leading terms, Macaulay matrices
# ---------------------------------------------------------------------------

def monomial_key(alpha: Tuple[int, ...], tidx: int):
    """Sort key; smaller key = larger monomial.

    Graded reverse-lexicographic with the minor variables smallest: total
    degree first, then the minor variable (the rightmost position where two
    equal-degree monomials differ is always a minor variable, so a larger
    subset wins), and only then the x-part, compared as exponent vectors
    with the first variable largest.  alpha is the x-multiset as a sorted
    tuple of variable indices; ascending tuple comparison is exactly
    descending exponent-lex, and it is multiplicative.
    """
    return (-(len(alpha) + 1), -tidx, alpha)


def leading_term(sys: BilinearSystem, p: int) -> Tuple[Optional[int], int]:
    """(x index or None, subset column index) of the largest monomial of poly p."""
    best = None
    best_key = None
    for j, t in zip(*np.nonzero(sys.bil[p])):
        key = monomial_key((int(j),), int(t))
        if best_key is None or key < best_key:
            best_key, best = key, (int(j), int(t))
    if best is not None:
        return best
    for t in np.nonzero(sys.aff[p])[0]:
        key = monomial_key((), int(t))
        if best_key is None or key < best_key:
            best_key, best = key, (None, int(t))
    if best is None:
        raise ValueError("zero polynomial has no leading term")
    return best


@dataclass(frozen=True)
class MacaulayMatrix:
    """Coefficient matrix of multiplier times polynomial rows.

    Columns are the monomials actually occurring, largest first under the
    fixed order; ``col_labels`` holds (multiset multiplier, subset column
    index) pairs referring to ``subsets``.
    """

    field: FiniteField
    arr: np.ndarray
    row_labels: Tuple            # (alpha, poly label)
    col_labels: Tuple            # (alpha, column index into subsets)
    subsets: Tuple[Tuple[int, ...], ...]
    b: int
    multipliers: str             # "exact" | "upto"


def _degree_tuples(nx: int, d: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(nx), d))


def macaulay(sys: BilinearSystem, b: int, multipliers: str = "exact",
             max_cells: int = 80_000_000) -> MacaulayMatrix:
    """Multiply the system by x-monomials and lay out the coefficient matrix.

    ``exact`` uses multipliers of degree b-1 (the span whose dimension the
    counting formulas predict); ``upto`` stacks all degrees 0..b-1, which is
    what the linearization solver wants since it keeps the degree-(0,1)
    block available for normalization.
    """
    if b < 1:
        raise ValueError("need b >= 1")
    if multipliers not in ("exact", "upto"):
        raise ValueError("multipliers must be 'exact' or 'upto'")
    degrees = [b - 1] if multipliers == "exact" else list(range(b))
    alphas = [a for d in degrees for a in _degree_tuples(sys.nx, d)]
    fld = sys.field
    row_labels = []
    rows: List[Dict[Tuple[Tuple[int, ...], int], int]] = []
    for alpha in alphas:
        for p in range(sys.npolys):
            row: Dict[Tuple[Tuple[int, ...], int], int] = {}
            for j, t in zip(*np.nonzero(sys.bil[p])):
                key = (tuple(sorted(alpha + (int(j),))), int(t))
                cur = row.get(key, 0)
                row[key] = fld.add(cur, int(sys.bil[p, j, t]))
            for t in np.nonzero(sys.aff[p])[0]:
                key = (alpha, int(t))
                cur = row.get(key, 0)
                row[key] = fld.add(cur, int(sys.aff[p, t]))
            rows.append({k: v for k, v in row.items() if v})
            row_labels.append((alpha, sys.labels[p]))
    occurring = sorted({key for row in rows for key in row},
                       key=lambda kt: monomial_key(*kt))
    if len(rows) * len(occurring) > max_cells:
        raise MonomialBudgetError(
            f"{len(rows)} x {len(occurring)} exceeds the cell budget")
    col_of = {key: i for i, key in enumerate(occurring)}
    arr = np.zeros((len(rows), len(occurring)), dtype=np.int64)
    for i, row in enumerate(rows):
        for key, v in row.items():
            arr[i, col_of[key]] = v
    return MacaulayMatrix(fld, arr, tuple(row_labels), tuple(occurring),
                          sys.subsets, b, multipliers)


def top_block(mac: MacaulayMatrix) -> np.ndarray:
    """Columns of exact bi-degree (b, 1): the homogeneous top of the rows.

    The proved dimension counts concern the span of the top parts; the
    affine matrix can have strictly larger rank through degree falls.
    """
    cols = [i for i, (alpha, _) in enumerate(mac.col_labels) if len(alpha) == mac.b]
    return mac.arr[:, cols]


def basis_bb(sys: BilinearSystem, part: QPartition, b: int) -> MacaulayMatrix:
    """The no-computation basis rows of the degree-(b,1) span.

    Takes each high-overlap polynomial whose second-smallest column is in
    the first k+1 positions and multiplies it by the monomials of degree
    b-1 supported on variables at or after its smallest column.
    """
    fld = sys.field
    rows = []
    row_labels = []
    for p in part.two_plus:
        i_set = sys.labels[p]
        i1 = i_set[0]
        vars_allowed = list(range(i1, sys.nx))
        for alpha in itertools.combinations_with_replacement(vars_allowed, b - 1):
            row: Dict[Tuple[Tuple[int, ...], int], int] = {}
            for j, t in zip(*np.nonzero(sys.bil[p])):
                key = (tuple(sorted(alpha + (int(j),))), int(t))
                row[key] = fld.add(row.get(key, 0), int(sys.bil[p, j, t]))
            for t in np.nonzero(sys.aff[p])[0]:
                key = (alpha, int(t))
                row[key] = fld.add(row.get(key, 0), int(sys.aff[p, t]))
            rows.append({k: v for k, v in row.items() if v})
            row_labels.append((alpha, i_set))
    occurring = sorted({key for row in rows for key in row},
                       key=lambda kt: monomial_key(*kt))
    col_of = {key: i for i, key in enumerate(occurring)}
    arr = np.zeros((len(rows), len(occurring)), dtype=np.int64)
    for i, row in enumerate(rows):
        for key, v in row.items():
            arr[i, col_of[key]] = v
    return MacaulayMatrix(fld, arr, tuple(row_labels), tuple(occurring),
                          sys.subsets, b, "basis")
