"""Guess-based reduction of RD/MinRank instances to smaller ones.

Betting that ``a`` positions (columns) of the solution vanish turns one
instance into at most q^(a r) smaller instances, exactly one of which is
solvable when the first r solution positions are independent (the standing
independence assumption).  Each guess is a square transform P_A that adds
F_q-combinations of the first r coordinates onto the last ``a``; a correct
bet zeroes those coordinates, after which shortening drops them together
with ``a`` code dimensions (RD) or ``a m`` linear variables (MinRank).

Drivers come in a deterministic flavour (enumerate all guesses, then
rerandomize and retry if the independence assumption fails) and a
probabilistic one (fresh right-rerandomization per trial, betting
directly); both verify every lifted candidate against the original
instance before accepting it, so spurious inner decodings are harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2
from typing import Callable, Iterator, List, Optional, Tuple, Union

import numpy as np

from .galois import FiniteField
from . import matlin as ml
from .instances import (InstanceError, MinRankInstance, RdInstance, RdWitness,
                        flatten_matrix, shorten, unflatten_matrix)
from . import solver as sv

__all__ = [
    "GuessMatrix",
    "RdReduction",
    "MinRankReduction",
    "FeasibilityReport",
    "HybridResult",
    "enumerate_guesses",
    "p_matrix",
    "reduce_rd",
    "reduce_minrank",
    "feasibility_probe",
    "rerandomize_rd",
    "rerandomize_minrank",
    "assumption_holds_rd",
    "assumption_holds_minrank",
    "hybrid_solve_rd",
    "hybrid_solve_minrank",
    "probabilistic_solve_rd",
    "probabilistic_solve_minrank",
]


@dataclass(frozen=True)
class GuessMatrix:
    """One bet: columns of A give the combinations added to the tail."""

    a: np.ndarray        # r x a over F_q
    code: int            # row-major little-endian base-q packing


def enumerate_guesses(a: int, r: int, q: int) -> Iterator[GuessMatrix]:
    """All q^(a r) guesses in ascending integer-code order."""
    if a < 0:
        raise ValueError("need a >= 0")
    total = q ** (a * r)
    for code in range(total):
        mat = np.zeros((r, a), dtype=np.int64)
        c = code
        for i in range(r):
            for j in range(a):
                mat[i, j] = c % q
                c //= q
        yield GuessMatrix(mat, code)


def p_matrix(fld: FiniteField, guess: np.ndarray, n: int) -> np.ndarray:
    """Unit upper-triangular transform fixing all but the last ``a`` columns."""
    r, a = guess.shape
    if r + a > n:
        raise ValueError("guess wider than the instance")
    p = ml.identity(n)
    if a:
        p[:r, n - a:] = fld.neg_arr(guess)
    return p


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RdReduction:
    instance: RdInstance
    guess: GuessMatrix
    p_a: np.ndarray
    parent: RdInstance

    def lift_error(self, e_reduced: np.ndarray) -> np.ndarray:
        """Error of the parent instance from an error of the reduced one."""
        fld = self.parent.field
        a = self.parent.n - self.instance.n
        padded = np.concatenate([e_reduced, np.zeros(a, dtype=np.int64)])
        p_inv = p_matrix(fld, fld.neg_arr(self.guess.a), self.parent.n)
        return ml.matmul(fld, padded[None, :], p_inv)[0]


def reduce_rd(rd: RdInstance, guess: GuessMatrix, a: int) -> Optional[RdReduction]:
    """Shorten at the last ``a`` positions after applying the guess transform.

    Returns None when the shortened code does not have the expected
    dimension k - a (the guess is then skipped, not fatal).
    """
    if a > rd.k:
        raise InstanceError("cannot shorten more positions than the dimension")
    fld = rd.field
    if a == 0:
        return RdReduction(rd, guess, ml.identity(rd.n), rd)
    p_a = p_matrix(fld, guess.a, rd.n)
    gen_t = ml.matmul(fld, rd.gen, p_a)
    y_t = ml.matmul(fld, rd.received[None, :], p_a)[0]
    tail = list(range(rd.n - a, rd.n))
    sh = shorten(fld, gen_t, tail)
    if sh.dim != rd.k - a or sh.b_block is None:
        return None
    comp = list(sh.complement)
    y_red = fld.sub_arr(y_t[comp],
                        ml.matmul(fld, y_t[tail][None, :], sh.b_block)[0])
    witness = _transport_rd_witness(rd, fld, p_a, sh, y_red)
    red = RdInstance(fld, rd.n - a, rd.k - a, rd.r, sh.gen_short, y_red, witness)
    return RdReduction(red, guess, p_a, rd)


def _transport_rd_witness(rd: RdInstance, fld: FiniteField, p_a: np.ndarray,
                          sh, y_red: np.ndarray) -> Optional[RdWitness]:
    if rd.witness is None:
        return None
    e_t = ml.matmul(fld, rd.witness.error[None, :], p_a)[0]
    a = len(sh.positions)
    if e_t[list(sh.positions)].any():
        return None                      # the bet is wrong for this guess
    e_red = e_t[list(sh.complement)]
    if ml.rank_weight(fld, e_red) != rd.r:
        return None
    c_red = fld.sub_arr(y_red, e_red)
    msg = ml.solve_right(fld, sh.gen_short.T, c_red)
    if msg is None:
        return None
    coeffs_t = ml.matmul(fld, rd.witness.coeffs, p_a)[:, list(sh.complement)] \
        if rd.r else rd.witness.coeffs
    return RdWitness(fld.neg_arr(msg), rd.witness.support, coeffs_t, e_red)


@dataclass(frozen=True)
class MinRankReduction:
    instance: MinRankInstance
    guess: GuessMatrix
    transform: np.ndarray            # D with D . L = (L' 0 ; B I)
    tail_flat: np.ndarray            # phi(M_0 P_A) on the shortened positions
    parent: MinRankInstance

    def lift_x(self, x_reduced: np.ndarray) -> np.ndarray:
        """Solution of the parent instance (guess transforms commute with x)."""
        fld = self.parent.field
        x_full = np.concatenate([x_reduced, fld.neg_arr(self.tail_flat)])
        return ml.matmul(fld, x_full[None, :], self.transform)[0]


def reduce_minrank(inst: MinRankInstance, guess: GuessMatrix, a: int
                   ) -> Optional[MinRankReduction]:
    """Drop ``a`` matrix columns and ``a m`` linear variables after the guess."""
    am = a * inst.m
    if am > inst.K:
        raise InstanceError("need a m <= K")
    fld = inst.field
    if a == 0:
        return MinRankReduction(inst, guess, ml.identity(inst.K),
                                np.zeros(0, dtype=np.int64), inst)
    p_a = p_matrix(fld, guess.a, inst.n)
    mats_t = [ml.matmul(fld, mi, p_a) for mi in inst.mats]
    rows = np.stack([flatten_matrix(mi) for mi in mats_t[1:]])
    tail = list(range(inst.m * (inst.n - a), inst.m * inst.n))
    sh = shorten(fld, rows, tail)
    if sh.dim != inst.K - am or sh.b_block is None:
        return None
    m0f = flatten_matrix(mats_t[0])
    comp = list(sh.complement)
    m0_red = fld.sub_arr(m0f[comp],
                         ml.matmul(fld, m0f[tail][None, :], sh.b_block)[0])
    new_mats = [unflatten_matrix(m0_red, inst.m)] + \
        [unflatten_matrix(sh.gen_short[i], inst.m) for i in range(inst.K - am)]
    witness = None
    if inst.witness is not None:
        e_t = ml.matmul(fld, inst.low_rank_matrix(inst.witness), p_a)
        if not e_t[:, inst.n - a:].any():
            d_inv = _invert(fld, sh.transform)
            witness = ml.matmul(fld, inst.witness[None, :], d_inv)[0][:inst.K - am]
    red = MinRankInstance(fld, inst.m, inst.n - a, inst.K - am, inst.r,
                          tuple(new_mats), witness)
    if witness is not None and not red.verify_witness():
        red = MinRankInstance(fld, red.m, red.n, red.K, red.r, red.mats, None)
    return MinRankReduction(red, guess, sh.transform, m0f[tail], inst)


def _invert(fld: FiniteField, mat: np.ndarray) -> np.ndarray:
    k = mat.shape[0]
    aug = np.concatenate([mat, ml.identity(k)], axis=1)
    res = ml.echelonize(fld, aug)
    if res.rank != k:
        raise ValueError("matrix is singular")
    return res.rref[:, k:]


# ---------------------------------------------------------------------------
# feasibility and rerandomization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the structural checks that make every guess shortenable."""

    case: str                      # "within-dimension" | "beyond-dimension"
    feasible_all: bool
    bad_guesses: int               # exhaustively counted in the second case
    bound_log2: float              # first-moment bound on a bad word existing


def feasibility_probe(rd: RdInstance, a: int) -> FeasibilityReport:
    """Check that all q^(a r) guesses lead to full-size shortenings.

    For r + a <= k it suffices that the first r positions together with the
    last a extend to an information set; beyond that the tail positions of
    the small auxiliary code are searched exhaustively for a bad dual word,
    and the analytic probability bound is reported alongside.
    """
    fld = rd.field
    q = rd.q
    n, k, r = rd.n, rd.k, rd.r
    head = list(range(r)) + list(range(n - a, n))
    bound = (rd.m + r) * a - rd.m * k
    if r + a <= k:
        rank = ml.echelonize(fld, rd.gen[:, head]).rank
        return FeasibilityReport("within-dimension", rank == r + a, 0,
                                 bound * log2(q))
    bad = 0
    g_head = rd.gen[:, :r]
    g_tail = rd.gen[:, n - a:]
    for guess in enumerate_guesses(a, r, q):
        cand = fld.sub_arr(g_tail, ml.matmul(fld, g_head, guess.a))
        if ml.echelonize(fld, cand).rank < a:
            bad += 1
    return FeasibilityReport("beyond-dimension", bad == 0, bad, bound * log2(q))


def rerandomize_rd(rd: RdInstance, seed: int) -> Tuple[RdInstance, np.ndarray]:
    """Right-multiply by a uniform invertible base-field matrix; returns P."""
    fld = rd.field
    base = fld.base
    rng = np.random.default_rng(seed)
    p = ml.random_invertible(base, rd.n, rng)
    gen = ml.matmul(fld, rd.gen, p)
    y = ml.matmul(fld, rd.received[None, :], p)[0]
    witness = None
    if rd.witness is not None:
        e = ml.matmul(fld, rd.witness.error[None, :], p)[0]
        coeffs = ml.matmul(base, rd.witness.coeffs, p) if rd.r else rd.witness.coeffs
        witness = RdWitness(rd.witness.x, rd.witness.support, coeffs, e)
    return RdInstance(fld, rd.n, rd.k, rd.r, gen, y, witness), p


def rerandomize_minrank(inst: MinRankInstance, seed: int
                        ) -> Tuple[MinRankInstance, np.ndarray]:
    fld = inst.field
    rng = np.random.default_rng(seed)
    p = ml.random_invertible(fld, inst.n, rng)
    mats = tuple(ml.matmul(fld, mi, p) for mi in inst.mats)
    return MinRankInstance(fld, inst.m, inst.n, inst.K, inst.r, mats,
                           inst.witness), p


def assumption_holds_rd(rd: RdInstance) -> bool:
    """First r positions of the planted error are F_q-independent."""
    if rd.witness is None:
        raise ValueError("needs a planted witness")
    return ml.rank_weight(rd.field, rd.witness.error[:rd.r]) == rd.r


def assumption_holds_minrank(inst: MinRankInstance) -> bool:
    """First r columns of the planted low-rank matrix are independent."""
    if inst.witness is None:
        raise ValueError("needs a planted witness")
    e = inst.low_rank_matrix(inst.witness)
    return ml.echelonize(inst.field, e[:, :inst.r]).rank == inst.r


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HybridResult:
    solution: Union[sv.RdSolution, np.ndarray]
    guesses_tried: int
    infeasible_skipped: int
    rounds: int                    # rerandomizations consumed
    trials: int                    # probabilistic mode only
    transcript: Tuple[str, ...]


def hybrid_solve_rd(rd: RdInstance, a: int,
                    inner: Optional[Callable[[RdInstance], sv.RdSolution]] = None,
                    seed: int = 0, max_rounds: int = 4) -> HybridResult:
    """Deterministic guess enumeration with rerandomized retries.

    Every lifted candidate is verified on the original instance; exhausting
    the guesses signals that the independence assumption fails for the
    current presentation, so the driver rerandomizes and retries.
    """
    fld = rd.field
    inner = inner or (lambda ri: sv.decode_rd(ri))
    transcript: List[str] = []
    current, p_total = rd, None
    for round_no in range(max_rounds + 1):
        tried = skipped = 0
        for guess in enumerate_guesses(a, rd.r, rd.q):
            tried += 1
            red = reduce_rd(current, guess, a)
            if red is None:
                skipped += 1
                transcript.append(f"round {round_no} guess {guess.code}: infeasible")
                continue
            try:
                inner_sol = inner(red.instance)
            except sv.Unsolved:
                continue
            e_cur = red.lift_error(inner_sol.error)
            if p_total is not None:
                p_inv = _invert(fld.base, p_total)
                e_orig = ml.matmul(fld, e_cur[None, :], p_inv)[0]
            else:
                e_orig = e_cur
            sol = _verify_rd(rd, e_orig)
            if sol is not None:
                transcript.append(
                    f"round {round_no} guess {guess.code}: verified")
                return HybridResult(sol, tried, skipped, round_no, 0,
                                    tuple(transcript))
            transcript.append(f"round {round_no} guess {guess.code}: lift rejected")
        transcript.append(f"round {round_no}: guesses exhausted, rerandomizing")
        current, p_total = rerandomize_rd(rd, seed + 7 * round_no + 1)
    raise sv.Unsolved(transcript)


def _verify_rd(rd: RdInstance, e: np.ndarray) -> Optional[sv.RdSolution]:
    fld = rd.field
    weight = ml.rank_weight(fld, e)
    if weight > rd.r:
        return None
    c = fld.sub_arr(rd.received, e)
    msg = ml.solve_right(fld, rd.gen.T, c)
    if msg is None:
        return None
    return sv.RdSolution(c, e, msg, weight, ("hybrid lift verified",))


def probabilistic_solve_rd(rd: RdInstance, a: int,
                           inner: Optional[Callable] = None,
                           seed: int = 0, max_trials: int = 4096) -> HybridResult:
    """Fresh rerandomization per trial, betting the tail is already zero."""
    inner = inner or (lambda ri: sv.decode_rd(ri))
    fld = rd.field
    zero_guess = GuessMatrix(np.zeros((rd.r, a), dtype=np.int64), 0)
    skipped = 0
    for trial in range(1, max_trials + 1):
        cur, p = rerandomize_rd(rd, seed * 65537 + trial)
        red = reduce_rd(cur, zero_guess, a)
        if red is None:
            skipped += 1
            continue
        try:
            inner_sol = inner(red.instance)
        except sv.Unsolved:
            continue
        e_cur = red.lift_error(inner_sol.error)
        p_inv = _invert(fld.base, p)
        e_orig = ml.matmul(fld, e_cur[None, :], p_inv)[0]
        sol = _verify_rd(rd, e_orig)
        if sol is not None:
            return HybridResult(sol, trial, skipped, 0, trial,
                                (f"trial {trial}: verified",))
    raise sv.Unsolved((f"no success in {max_trials} trials",))


def hybrid_solve_minrank(inst: MinRankInstance, a: int,
                         inner: Optional[Callable] = None,
                         seed: int = 0, max_rounds: int = 4) -> HybridResult:
    inner = inner or (lambda mi: sv.solve_minrank_linearized(mi))
    fld = inst.field
    transcript: List[str] = []
    current, p_total = inst, None
    for round_no in range(max_rounds + 1):
        tried = skipped = 0
        for guess in enumerate_guesses(a, inst.r, fld.order):
            tried += 1
            red = reduce_minrank(current, guess, a)
            if red is None:
                skipped += 1
                transcript.append(f"round {round_no} guess {guess.code}: infeasible")
                continue
            x_red = inner(red.instance)
            if not isinstance(x_red, np.ndarray):
                continue
            x = red.lift_x(x_red)
            # guesses and rerandomizations act on columns only, so x carries
            # over to the original matrices unchanged
            e = inst.low_rank_matrix(x)
            if ml.echelonize(fld, e).rank <= inst.r:
                transcript.append(f"round {round_no} guess {guess.code}: verified")
                return HybridResult(x, tried, skipped, round_no, 0,
                                    tuple(transcript))
            transcript.append(f"round {round_no} guess {guess.code}: lift rejected")
        transcript.append(f"round {round_no}: guesses exhausted, rerandomizing")
        current, p_total = rerandomize_minrank(inst, seed + 7 * round_no + 1)
    raise sv.Unsolved(transcript)


def probabilistic_solve_minrank(inst: MinRankInstance, a: int,
                                inner: Optional[Callable] = None,
                                seed: int = 0, max_trials: int = 4096
                                ) -> HybridResult:
    inner = inner or (lambda mi: sv.solve_minrank_linearized(mi))
    fld = inst.field
    zero_guess = GuessMatrix(np.zeros((inst.r, a), dtype=np.int64), 0)
    skipped = 0
    for trial in range(1, max_trials + 1):
        cur, _p = rerandomize_minrank(inst, seed * 65537 + trial)
        red = reduce_minrank(cur, zero_guess, a)
        if red is None:
            skipped += 1
            continue
        x_red = inner(red.instance)
        if not isinstance(x_red, np.ndarray):
            continue
        x = red.lift_x(x_red)
        if ml.echelonize(fld, cur.low_rank_matrix(x)).rank <= inst.r:
            if ml.echelonize(fld, inst.low_rank_matrix(x)).rank <= inst.r:
                return HybridResult(x, trial, skipped, 0, trial,
                                    (f"trial {trial}: verified",))
    raise sv.Unsolved((f"no success in {max_trials} trials",))
