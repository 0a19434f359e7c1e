"""Generation and normal forms of rank-decoding and MinRank instances.

Conventions used throughout the package:

* An RD instance is (G, y) with G a full-rank k x n generator matrix over
  F_{q^m} and y the noisy word.  A planted witness stores the vector x
  *in modeling sign*: y + x G = e, where e = (s_1..s_r) C has rank weight
  exactly r.  The codeword part is therefore c = -x G = y - e.
* A MinRank instance is (M_0, ..., M_K) over F_q with a planted x such
  that M_0 + sum x_i M_i has rank exactly r.
* Every transformation (canonical form, shortening, puncturing, variable
  changes) records enough data to transport witnesses in both directions;
  the proofs these forms come from perform the bookkeeping silently, but
  end-to-end tests need to map solutions back to the original instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .galois import FiniteField, make_base_field, make_ext_field
from . import matlin as ml

__all__ = [
    "RdWitness",
    "RdInstance",
    "CanonicalRd",
    "MinRankInstance",
    "MinRankGenMatrix",
    "ShortenResult",
    "InstanceError",
    "gen_rd",
    "canonicalize",
    "shorten",
    "puncture_rd",
    "rd_to_minrank",
    "gen_minrank",
    "minrank_systematic",
    "flatten_matrix",
    "unflatten_matrix",
]


class InstanceError(ValueError):
    """Raised for malformed parameters or degenerate instances."""


# ---------------------------------------------------------------------------
# rank decoding instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RdWitness:
    """Planted solution: y + x G = e = (support elements) . coeffs."""

    x: np.ndarray          # length k over F_{q^m}, modeling sign
    support: np.ndarray    # r independent elements of F_{q^m}
    coeffs: np.ndarray     # r x n full-rank matrix over F_q
    error: np.ndarray      # length n over F_{q^m}


@dataclass(frozen=True)
class RdInstance:
    field: FiniteField     # F_{q^m}
    n: int
    k: int
    r: int
    gen: np.ndarray        # k x n over F_{q^m}
    received: np.ndarray   # length n
    witness: Optional[RdWitness] = None

    @property
    def q(self) -> int:
        return self.field.base.order if self.field.base else self.field.order

    @property
    def m(self) -> int:
        return self.field.degree

    def verify_witness(self) -> bool:
        if self.witness is None:
            return False
        fld = self.field
        e = fld.add_arr(self.received,
                        ml.matmul(fld, self.witness.x[None, :], self.gen)[0])
        return bool((e == self.witness.error).all()
                    and ml.rank_weight(fld, e) == self.r)


def _error_from_support(fld: FiniteField, support: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    return ml.matmul(fld, support[None, :], coeffs)[0]


def gen_rd(q: int, m: int, n: int, k: int, r: int, seed: int) -> RdInstance:
    """Seeded uniform RD instance with an exact-weight-r planted error.

    The support elements are resampled until F_q-independent and the
    coefficient matrix until full rank, so rank(Mat(e)) = r by construction.
    """
    if not 0 < k < n:
        raise InstanceError("need 0 < k < n")
    if r < 0 or r > min(m, n):
        raise InstanceError("need 0 <= r <= min(m, n)")
    fld = make_ext_field(q, m)
    rng = np.random.default_rng(seed)
    gen = ml.random_full_rank(fld, k, n, rng)
    x = fld.rand_elements(rng, k)
    if r == 0:
        e = np.zeros(n, dtype=np.int64)
        support = np.zeros(0, dtype=np.int64)
        coeffs = np.zeros((0, n), dtype=np.int64)
    else:
        base = fld.base
        while True:
            support = fld.rand_elements(rng, r)
            if ml.echelonize(base, ml.mat_of(fld, support)).rank == r:
                break
        coeffs = ml.random_full_rank(base, r, n, rng)
        e = _error_from_support(fld, support, coeffs)
    y = fld.add_arr(fld.neg_arr(ml.matmul(fld, x[None, :], gen)[0]), e)
    inst = RdInstance(fld, n, k, r, gen, y, RdWitness(x, support, coeffs, e))
    assert ml.rank_weight(fld, e) == r
    return inst


# ---------------------------------------------------------------------------
# canonical (systematic) form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalRd:
    """Systematic form: G = (I_k | *), y = (0_k, 1, *), with parity data.

    ``h_y`` is a parity check of the extended code C + <y> in systematic
    form (* | I_{n-k-1}); ``h`` completes it to a parity check of C and
    satisfies y . h^T = 1.  ``perm`` (position permutation), ``offset``
    (codeword added to y) and ``scale`` (y was multiplied by scale) map
    solutions between the original and canonical coordinates.
    """

    field: FiniteField
    n: int
    k: int
    r: int
    gen: np.ndarray
    received: np.ndarray
    h_y: np.ndarray
    h: np.ndarray
    perm: np.ndarray       # canonical position j came from original perm[j]
    offset: np.ndarray     # codeword (original coords) subtracted from y
    scale: int             # canonical y = scale * (permuted, offset y)
    origin: RdInstance
    witness: Optional[RdWitness] = None

    def error_to_origin(self, e_can: np.ndarray) -> np.ndarray:
        """Map a canonical-coordinates error back to the original instance."""
        fld = self.field
        e = fld.mul_arr(e_can, fld.inv(self.scale))
        out = np.zeros_like(e)
        out[self.perm] = e
        return out

    def error_from_origin(self, e_orig: np.ndarray) -> np.ndarray:
        fld = self.field
        return fld.mul_arr(np.asarray(e_orig)[self.perm], self.scale)


def canonicalize(rd: RdInstance, perm_seed: Optional[int] = None) -> CanonicalRd:
    """Permute/offset/scale an RD instance into the systematic shape.

    ``perm_seed`` shuffles the position order before choosing the
    information set, giving the solver fresh canonicalizations on retry.
    """
    fld = rd.field
    n, k = rd.n, rd.k
    order = np.arange(n)
    if perm_seed is not None:
        np.random.default_rng(perm_seed).shuffle(order)
    res = ml.echelonize(fld, rd.gen[:, order])
    if res.rank != k:
        raise InstanceError("generator matrix is not full rank")
    piv = [int(order[c]) for c in res.pivots]
    rest = [j for j in order.tolist() if j not in set(piv)]
    perm = np.array(piv + rest)
    gen = ml.echelonize(fld, rd.gen[:, perm]).rref
    y1 = np.asarray(rd.received)[perm]
    # offset by the codeword matching y on the information set
    xoff = y1[:k]
    offset_can = ml.matmul(fld, xoff[None, :], gen)[0]
    y2 = fld.sub_arr(y1, offset_can)
    nz = np.nonzero(y2[k:])[0]
    if nz.size == 0:
        raise InstanceError("received word lies in the code")
    j = k + int(nz[0])
    if j != k:
        perm[[k, j]] = perm[[j, k]]
        gen[:, [k, j]] = gen[:, [j, k]]
        y2[[k, j]] = y2[[j, k]]
    scale = fld.inv(int(y2[k]))
    y = fld.mul_arr(y2, scale)
    # parity check of C + <y> from the systematic (k+1) x n stack of G and y
    a2 = gen[:, k:]
    ytail = y[k + 1:]
    top = fld.sub_arr(a2[:, 1:], ml.matmul(fld, a2[:, :1], ytail[None, :]))
    atil = np.concatenate([top, ytail[None, :]], axis=0)      # (k+1) x (n-k-1)
    h_y = np.concatenate([fld.neg_arr(atil).T, ml.identity(n - k - 1)], axis=1)
    h = np.concatenate([fld.neg_arr(a2[:, 0]), [1], np.zeros(n - k - 1, dtype=np.int64)])
    offset_orig = np.zeros(n, dtype=np.int64)
    offset_orig[perm] = offset_can
    witness = None
    if rd.witness is not None:
        e_can = fld.mul_arr(rd.witness.error[perm], scale)
        x_can = fld.neg_arr(fld.sub_arr(y, e_can))[:k]
        support = fld.mul_arr(rd.witness.support, scale) if rd.r else rd.witness.support
        coeffs = rd.witness.coeffs[:, perm] if rd.r else rd.witness.coeffs
        witness = RdWitness(x_can, support, coeffs, e_can)
    can = CanonicalRd(fld, n, k, rd.r, gen, y, h_y, h, perm, offset_orig,
                      scale, rd, witness)
    _check_canonical(can)
    return can


def _check_canonical(can: CanonicalRd) -> None:
    fld = can.field
    assert not ml.matmul(fld, can.gen, can.h_y.T).any(), "G . H_y^T != 0"
    assert not ml.matmul(fld, can.received[None, :], can.h_y.T).any(), "y . H_y^T != 0"
    assert not ml.matmul(fld, can.gen, can.h[:, None]).any(), "h not in the dual"
    ydoth = ml.matmul(fld, can.received[None, :], can.h[:, None])[0, 0]
    assert int(ydoth) == 1, "y . h^T != 1"
    if can.witness is not None:
        e = fld.add_arr(can.received, ml.matmul(fld, can.witness.x[None, :], can.gen)[0])
        assert (e == can.witness.error).all()


# ---------------------------------------------------------------------------
# shortening / puncturing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShortenResult:
    """Block data for shortening at a position set J.

    When ``dim == k - len(J)`` the rows of ``transform @ gen`` split as
    (gen_short 0 ; b_block I) on (complement, J); otherwise only ``dim``
    and ``gen_short`` (a basis of the shortened code) are meaningful.
    """

    dim: int
    gen_short: np.ndarray          # dim x (n - |J|), on the complement positions
    b_block: Optional[np.ndarray]  # |J| x (n - |J|) when the block shape exists
    transform: np.ndarray          # invertible k x k row transformation
    positions: Tuple[int, ...]     # J
    complement: Tuple[int, ...]


def shorten(fld: FiniteField, gen: np.ndarray, positions: Sequence[int]) -> ShortenResult:
    """Shortened code {c restricted to the complement : c in C, c_J = 0}."""
    gen = np.asarray(gen, dtype=np.int64)
    k, n = gen.shape
    j_set = sorted(int(j) for j in positions)
    comp = [j for j in range(n) if j not in set(j_set)]
    a = len(j_set)
    # RREF with J columns leading, identity appended to track the transform
    reordered = np.concatenate([gen[:, j_set], gen[:, comp], ml.identity(k)], axis=1)
    res = ml.echelonize(fld, reordered)
    rj = sum(1 for p in res.pivots if p < a)
    dim = k - rj
    transform = res.rref[:, a + len(comp):]
    on_j = res.rref[:, :a]
    on_comp = res.rref[:, a:a + len(comp)]
    zero_rows = [i for i in range(k) if not on_j[i].any()]
    gen_short = on_comp[zero_rows]
    b_block = None
    if rj == a and dim == len(zero_rows):
        piv_rows = [i for i in range(k) if on_j[i].any()]
        # reorder rows: shortened block first, then the identity-on-J block
        order = zero_rows + piv_rows
        transform = transform[order]
        b_block = on_comp[piv_rows]
    return ShortenResult(dim, gen_short, b_block, transform,
                         tuple(j_set), tuple(comp))


def puncture_rd(rd: RdInstance, p: int) -> RdInstance:
    """Drop the last p positions; the witness survives when its support does."""
    if not 0 <= p < rd.n - rd.k:
        raise InstanceError("puncturing depth out of range")
    if p == 0:
        return rd
    n2 = rd.n - p
    fld = rd.field
    witness = None
    if rd.witness is not None:
        e2 = rd.witness.error[:n2]
        if ml.rank_weight(fld, e2) == rd.r:
            witness = RdWitness(rd.witness.x, rd.witness.support,
                                rd.witness.coeffs[:, :n2], e2)
    return RdInstance(fld, n2, rd.k, rd.r, rd.gen[:, :n2], rd.received[:n2], witness)


# ---------------------------------------------------------------------------
# MinRank instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinRankInstance:
    field: FiniteField         # F_q
    m: int
    n: int
    K: int
    r: int
    mats: Tuple[np.ndarray, ...]   # M_0, M_1, ..., M_K, each m x n
    witness: Optional[np.ndarray] = None

    def low_rank_matrix(self, x: Sequence[int]) -> np.ndarray:
        acc = np.array(self.mats[0], dtype=np.int64)
        for i, xi in enumerate(x):
            if xi:
                acc = self.field.add_arr(acc, self.field.mul_arr(int(xi), self.mats[i + 1]))
        return acc

    def verify_witness(self) -> bool:
        if self.witness is None:
            return False
        e = self.low_rank_matrix(self.witness)
        return ml.echelonize(self.field, e).rank == self.r


def flatten_matrix(mat: np.ndarray) -> np.ndarray:
    """Column-major flattening: column j occupies slots jm..jm+m-1."""
    return np.asarray(mat, dtype=np.int64).T.reshape(-1)


def unflatten_matrix(vec: np.ndarray, m: int) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.int64)
    return vec.reshape(-1, m).T


def gen_minrank(q: int, m: int, n: int, K: int, r: int, seed: int) -> MinRankInstance:
    """Seeded MinRank instance with a planted rank-r combination."""
    if K < 1:
        raise InstanceError("need K >= 1")
    if not 0 < r <= min(m, n):
        raise InstanceError("need 0 < r <= min(m, n)")
    fld = make_base_field(q)
    rng = np.random.default_rng(seed)
    mats = [fld.rand_elements(rng, (m, n)) for _ in range(K)]
    x = fld.rand_elements(rng, K)
    left = ml.random_full_rank(fld, m, r, rng)
    right = ml.random_full_rank(fld, r, n, rng)
    target = ml.matmul(fld, left, right)
    m0 = np.array(target)
    for i, xi in enumerate(x):
        if xi:
            m0 = fld.sub_arr(m0, fld.mul_arr(int(xi), mats[i]))
    inst = MinRankInstance(fld, m, n, K, r, tuple([m0] + mats), x)
    assert inst.verify_witness()
    return inst


@dataclass(frozen=True)
class MinRankGenMatrix:
    """RREF generator matrix of the matrix code spanned by M_1..M_K.

    Row i is the column-major flattening of the i-th reduced matrix; row
    operations on it are invertible changes of the linear variables, and
    the systematic position set is the pivot set.
    """

    gen: np.ndarray                # K x (m n), RREF
    pivots: Tuple[int, ...]        # systematic positions S
    transform: np.ndarray          # K x K: gen = transform @ original rows


def minrank_systematic(inst: MinRankInstance) -> Tuple[MinRankGenMatrix, MinRankInstance]:
    """Equivalent instance with the generator in RREF and M_0 zero on S.

    Raises InstanceError when the M_i span has dimension below K (no
    systematic form exists; reported rather than guessed around).
    """
    fld = inst.field
    rows = np.stack([flatten_matrix(mi) for mi in inst.mats[1:]])
    aug = np.concatenate([rows, ml.identity(inst.K)], axis=1)
    res = ml.echelonize(fld, aug)
    nm = inst.m * inst.n
    piv = tuple(p for p in res.pivots if p < nm)
    if len(piv) != inst.K:
        raise InstanceError("matrix code is rank deficient; no systematic form")
    gen = res.rref[:, :nm]
    transform = res.rref[:, nm:]
    m0f = flatten_matrix(inst.mats[0])
    red = np.array([m0f[p] for p in piv], dtype=np.int64)
    m0f2 = fld.sub_arr(m0f, ml.matmul(fld, red[None, :], gen)[0])
    new_mats = tuple([unflatten_matrix(m0f2, inst.m)]
                     + [unflatten_matrix(gen[i], inst.m) for i in range(inst.K)])
    witness = None
    if inst.witness is not None:
        # E = M0 + x.rows = M0' + (x.Tinv + red).gen with gen = transform.rows
        tinv = ml.echelonize(fld, np.concatenate(
            [transform, ml.identity(inst.K)], axis=1)).rref[:, inst.K:]
        witness = fld.add_arr(ml.matmul(fld, inst.witness[None, :], tinv)[0], red)
    out = MinRankInstance(fld, inst.m, inst.n, inst.K, inst.r, new_mats, witness)
    if witness is not None:
        assert out.verify_witness()
    return MinRankGenMatrix(gen, piv, transform), out


# ---------------------------------------------------------------------------
# RD -> MinRank reduction
# ---------------------------------------------------------------------------

def rd_to_minrank(rd: RdInstance) -> MinRankInstance:
    """Expand an RD instance into the equivalent K = k m MinRank instance.

    Matrix index (j, l) -> 1 + j m + l holds Mat(b_l G_j); a solution x
    over F_{q^m} transports to its coordinate grid, and evaluating the
    combination at the transported witness reproduces Mat(e).
    """
    fld = rd.field
    base = fld.base
    m, n, k = rd.m, rd.n, rd.k
    mats: List[np.ndarray] = [ml.mat_of(fld, rd.received)]
    for j in range(k):
        row = rd.gen[j]
        for bl in fld.basis:
            mats.append(ml.mat_of(fld, fld.mul_arr(bl, row)))
    witness = None
    if rd.witness is not None:
        grid = [c for xj in rd.witness.x for c in fld.coeffs(int(xj))]
        witness = np.array(grid, dtype=np.int64)
    out = MinRankInstance(base, m, n, k * m, rd.r, tuple(mats), witness)
    if witness is not None:
        assert out.verify_witness()
    return out
