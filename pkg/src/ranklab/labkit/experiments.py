"""Seeded pass/fail experiments for every structural claim in the package.

Each property name maps to a per-trial check on a fresh seeded instance;
exact algebraic identities must hold on every trial, statistical
(genericity) claims pass at the documented 95% threshold with failures
reported verbatim.  Reports are reproducible bit for bit from
(property, params, seed).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .. import matlin as ml
from .. import modelings as md
from .. import solver as sv
from .. import hybrid as hy
from ..estimator import nb_fqm, nsyz
from ..instances import canonicalize, gen_minrank, gen_rd

__all__ = ["ExperimentReport", "PRESET_ENVELOPE", "PROPERTIES", "verify"]

# every code path is exercised by these: an overdetermined linear case, the
# eliminated-bilinear case, a hybrid case, and a q = 4 tower for unfolding
PRESET_ENVELOPE: Tuple[Tuple[int, int, int, int, int], ...] = (
    (2, 3, 5, 2, 1),
    (2, 7, 8, 4, 2),
    (2, 7, 10, 3, 2),
    (2, 7, 12, 5, 2),
    (4, 5, 8, 3, 2),
)

GENERICITY_THRESHOLD = 0.95


@dataclass(frozen=True)
class ExperimentReport:
    property_name: str
    params: Tuple[int, ...]
    seed: int
    trials: int
    passes: int
    failures: Tuple[str, ...]
    measured: Tuple
    expected: Tuple
    threshold: float
    verdict: bool
    elapsed: float

    def one_line(self) -> str:
        flag = "pass" if self.verdict else "FAIL"
        return (f"{self.property_name} {self.params}: {self.passes}/{self.trials} "
                f"trials ok (threshold {self.threshold:.0%}) -> {flag} "
                f"[{self.elapsed:.2f}s]")


def _canonical_systems(q, m, n, k, r, seed, envelope=False):
    rd = (sv.gen_rd_generic(q, m, n, k, r, seed) if envelope
          else gen_rd(q, m, n, k, r, seed))
    can = canonicalize(rd)
    mm = md.build_mm_fqm(can)
    mmq = md.build_mm_fq(mm)
    sm, part = md.build_sm_fqm(can)
    return rd, can, mm, mmq, sm, part


def _combine(fld, sm: md.BilinearSystem, coefs: Sequence[int]):
    """Linear combination of the system's polynomials; (bil, aff) arrays."""
    bil = np.zeros_like(sm.bil[0])
    aff = np.zeros_like(sm.aff[0])
    for p, c in enumerate(coefs):
        c = int(c)
        if c:
            bil = fld.add_arr(bil, fld.mul_arr(c, sm.bil[p]))
            aff = fld.add_arr(aff, fld.mul_arr(c, sm.aff[p]))
    return bil, aff


# ---------------------------------------------------------------------------
# per-trial checks; each returns (ok, measured, expected, note)
# ---------------------------------------------------------------------------

def _check_nb_rank(params, seed, bs=(1, 2, 3)):
    q, m, n, k, r = params
    _, can, _, _, sm, part = _canonical_systems(*params, seed)
    q2 = md.subsystem(sm, part.two_plus)
    measured, expected = [], []
    for b in bs:
        mac = md.macaulay(q2, b)
        measured.append(ml.echelonize(can.field, md.top_block(mac)).rank)
        expected.append(nb_fqm(n, k, r, b))
    return measured == expected, tuple(measured), tuple(expected), ""


def _check_q0_span(params, seed):
    q, m, n, k, r = params
    _, can, _, _, sm, _ = _canonical_systems(*params, seed)
    fld = can.field
    bad = 0
    for t_rows in ml.all_subsets(n - k - 1, r + 1):
        coefs = ml.maximal_minors(fld, can.h_y[list(t_rows)], r + 1)
        bil, aff = _combine(fld, sm, coefs)
        if bil.any() or aff.any():
            bad += 1
    return bad == 0, (bad,), (0,), ""


def _check_lt_independence(params, seed):
    q, m, n, k, r = params
    _, can, mm, _, sm, part = _canonical_systems(*params, seed)
    fld = can.field
    nt = comb(n, r)
    # leading-term table
    for p, j_rows in enumerate(mm.row_labels):
        tail = tuple(j + k + 1 for j in j_rows)
        top = int(np.nonzero(mm.coeffs[p])[0][-1])
        if top != ml.subset_rank(n, tail):
            return False, ("lt-p",), (p,), "linear leading term off"
    for p in part.two_plus:
        i_set = sm.labels[p]
        j, t = md.leading_term(sm, p)
        if j != i_set[0] or ml.subset_unrank(n, r, t) != i_set[1:]:
            return False, ("lt-q",), (p,), "bilinear leading term off"
        for j_rows in ml.all_subsets(n - k - 1, r):
            tail = ml.subset_rank(n, tuple(x + k + 1 for x in j_rows))
            if sm.bil[p, :, tail].any() or sm.aff[p, tail]:
                return False, ("tail-var",), (p,), "tail minor appears"
    # stacked rank of linear rows, their variable multiples, and the rest
    rows = []
    for p in range(mm.nrows):
        rows.append(np.concatenate([np.zeros((k, nt), dtype=np.int64).reshape(-1),
                                    mm.coeffs[p]]))
        for j in range(k):
            bil = np.zeros((k, nt), dtype=np.int64)
            bil[j] = mm.coeffs[p]
            rows.append(np.concatenate([bil.reshape(-1), np.zeros(nt, dtype=np.int64)]))
    for p in part.two_plus:
        rows.append(np.concatenate([sm.bil[p].reshape(-1), sm.aff[p]]))
    rank = ml.echelonize(fld, np.stack(rows)).rank
    expect = (k + 1) * comb(n - k - 1, r) + len(part.two_plus)
    return rank == expect, (rank,), (expect,), ""


def _check_q1_correspondence(params, seed):
    q, m, n, k, r = params
    _, can, mm, _, sm, _ = _canonical_systems(*params, seed)
    fld = can.field
    nt = comb(n, r)
    h_full = np.concatenate([can.h_y, can.h[None, :]], axis=0)
    for p, j_rows in enumerate(mm.row_labels):
        # identity 1: the signed linear row equals a combination of minors
        # of the full parity check against the bilinear equations
        coefs = ml.maximal_minors(fld, h_full[list(j_rows) + [n - k - 1]], r + 1)
        bil, aff = _combine(fld, sm, coefs)
        target = np.array(mm.coeffs[p])
        if r % 2:
            target = fld.neg_arr(target)
        if bil.any() or (aff != target).any():
            return False, ("id1",), (p,), "linear-row correspondence failed"
        # identity 2: x_j times the linear row, via minors with j removed
        hy_minors = ml.maximal_minors(fld, can.h_y[list(j_rows)], r)
        for j in range(k):
            bil = np.zeros_like(sm.bil[0])
            aff = np.zeros_like(sm.aff[0])
            for pp in range(sm.npolys):
                i_set = sm.labels[pp]
                if j not in i_set:
                    continue
                pos = i_set.index(j)
                c = int(hy_minors[ml.subset_rank(n, i_set[:pos] + i_set[pos + 1:])])
                if pos % 2:
                    c = fld.neg(c)
                if c:
                    bil = fld.add_arr(bil, fld.mul_arr(c, sm.bil[pp]))
                    aff = fld.add_arr(aff, fld.mul_arr(c, sm.aff[pp]))
            tgt = np.zeros((k, nt), dtype=np.int64)
            tgt[j] = mm.coeffs[p]
            if (bil != tgt).any() or aff.any():
                return False, ("id2",), (p, j), "variable-multiple correspondence failed"
    return True, (1,), (1,), ""


def _check_unfold_sm(params, seed):
    _, can, _, _, sm, _ = _canonical_systems(*params, seed)
    unfolded = md.build_sm_fq(sm)
    direct = md.sm_fq_direct(can)
    same = (unfolded.bil == direct.bil).all() and (unfolded.aff == direct.aff).all()
    return bool(same), (int(same),), (1,), ""


def _check_mm_rank(params, seed):
    # the genericity statement presumes unique-solution instances, so the
    # draw is conditioned on uniqueness where extra decodings are likely
    q, m, n, k, r = params
    rd = sv.gen_rd_unique(q, m, n, k, r, seed, threshold=0.1)
    can = canonicalize(rd)
    mmq = md.build_mm_fq(md.build_mm_fqm(can))
    rank = ml.echelonize(mmq.field, mmq.coeffs).rank
    expect = min(m * comb(n - k - 1, r), comb(n, r) - 1)
    return rank == expect, (rank,), (expect,), ""


def _check_syzygy_count(params, seed, bs=(1, 2, 3)):
    q, m, n, k, r = params
    _, can, _, mmq, sm, part = _canonical_systems(*params, seed, envelope=True)
    fld = can.field
    plus = md.reduce_sm_plus(sm, part, mmq, k)
    # exact relations between the reduced polynomials, coefficients over F_q
    duals = fld.dual_basis()
    nf_all = md.nf_bilinear(plus, sm, range(sm.npolys))
    for t_rows in ml.all_subsets(n - k - 1, r + 1):
        minors = ml.maximal_minors(fld, can.h_y[list(t_rows)], r + 1)
        for bs_el in duals:
            coefs = [fld.trace(fld.mul(bs_el, int(c))) for c in minors]
            bil, aff = _combine(fld, nf_all, coefs)
            if bil.any() or aff.any():
                return False, ("relation",), (0,), "reduced relation not zero"
    # conjectured rank law at each bi-degree
    measured, expected = [], []
    for b in bs:
        mac = md.macaulay(plus.system, b)
        measured.append(ml.echelonize(fld, mac.arr).rank)
        expected.append(min(nb_fqm(n, k, r, b) - nsyz(m, n, k, r, b),
                            mac.arr.shape[1] - 1))
    return measured == expected, tuple(measured), tuple(expected), ""


def _check_hybrid_correct(params, seed, a: int = 1):
    """Deterministic guess driver finds the planted error within q^(a r)."""
    q, m, n, k, r = params
    rd = gen_rd(q, m, n, k, r, seed)
    attempt = 0
    while not hy.assumption_holds_rd(rd):
        rd, _ = hy.rerandomize_rd(rd, seed * 31 + attempt)
        attempt += 1
    res = hy.hybrid_solve_rd(rd, a=a, seed=seed)
    ok = bool((res.solution.error == rd.witness.error).all()
              and res.guesses_tried <= q ** (a * r) and res.rounds == 0)
    return ok, (res.guesses_tried,), (q ** (a * r),), ""


def _check_hybrid_minrank(params, seed, a: int = 1):
    """MinRank analogue of the guess driver; params are (q, m, n, K, r)."""
    q, m, n, K, r = params
    mri = gen_minrank(q, m, n, K, r, seed)
    attempt = 0
    while not hy.assumption_holds_minrank(mri):
        mri, _ = hy.rerandomize_minrank(mri, seed * 37 + attempt)
        attempt += 1
    res = hy.hybrid_solve_minrank(mri, a=a, seed=seed)
    e = mri.low_rank_matrix(res.solution)
    ok = (ml.echelonize(mri.field, e).rank <= r
          and res.guesses_tried <= q ** (a * r) and res.rounds == 0)
    return bool(ok), (res.guesses_tried,), (q ** (a * r),), ""


PROPERTIES: Dict[str, Tuple[Callable, float]] = {
    "nb-rank": (_check_nb_rank, 1.0),
    "q0-span": (_check_q0_span, 1.0),
    "lt-independence": (_check_lt_independence, 1.0),
    "q1-correspondence": (_check_q1_correspondence, 1.0),
    "unfold-sm": (_check_unfold_sm, 1.0),
    "mm-rank": (_check_mm_rank, GENERICITY_THRESHOLD),
    "syzygy-count": (_check_syzygy_count, GENERICITY_THRESHOLD),
    "hybrid-correct": (_check_hybrid_correct, 1.0),
    "hybrid-correct-minrank": (_check_hybrid_minrank, 1.0),
}


def verify(property_name: str, params: Sequence[int], trials: int = 10,
           seed: int = 1, **kwargs) -> ExperimentReport:
    """Run the named check on fresh seeded instances and report verdicts."""
    if property_name not in PROPERTIES:
        raise ValueError(f"unknown property {property_name!r}; "
                         f"known: {sorted(PROPERTIES)}")
    check, threshold = PROPERTIES[property_name]
    t0 = time.perf_counter()
    passes = 0
    failures: List[str] = []
    measured_all: List = []
    expected_all: List = []
    for t in range(trials):
        ok, measured, expected, note = check(tuple(params), seed + t, **kwargs)
        measured_all.append(measured)
        expected_all.append(expected)
        if ok:
            passes += 1
        else:
            failures.append(f"trial {t} (seed {seed + t}): measured {measured} "
                            f"expected {expected} {note}".strip())
    verdict = (passes == trials) if threshold >= 1.0 else \
        (passes >= threshold * trials)
    return ExperimentReport(property_name, tuple(params), seed, trials, passes,
                            tuple(failures), tuple(measured_all),
                            tuple(expected_all), threshold, bool(verdict),
                            time.perf_counter() - t0)
