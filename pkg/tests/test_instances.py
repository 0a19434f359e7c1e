"""Instance generation, canonical forms, shortening, conversions."""

import numpy as np
import pytest

from ranklab import instances as inst
from ranklab import matlin as ml


def test_gen_rd_postconditions():
    rd = inst.gen_rd(2, 7, 8, 4, 2, seed=1)
    assert rd.verify_witness()
    assert ml.rank_weight(rd.field, rd.witness.error) == 2
    assert ml.echelonize(rd.field, rd.gen).rank == 4
    # support dimension of y + x G equals the planted weight
    fld = rd.field
    e = fld.add_arr(rd.received, ml.matmul(fld, rd.witness.x[None, :], rd.gen)[0])
    assert ml.rank_weight(fld, e) == 2


def test_gen_rd_deterministic():
    a = inst.gen_rd(2, 7, 8, 4, 2, seed=9)
    b = inst.gen_rd(2, 7, 8, 4, 2, seed=9)
    assert (a.gen == b.gen).all() and (a.received == b.received).all()
    c = inst.gen_rd(2, 7, 8, 4, 2, seed=10)
    assert (a.gen != c.gen).any()


def test_gen_rd_weight_zero():
    rd = inst.gen_rd(2, 3, 6, 2, 0, seed=2)
    assert not rd.witness.error.any()
    # received word is a codeword
    assert ml.solve_right(rd.field, rd.gen.T, rd.received) is not None


def test_gen_rd_parameter_validation():
    with pytest.raises(inst.InstanceError):
        inst.gen_rd(2, 7, 4, 4, 2, seed=1)
    with pytest.raises(inst.InstanceError):
        inst.gen_rd(2, 3, 8, 4, 5, seed=1)


@pytest.mark.parametrize("params,seed", [((2, 7, 8, 4, 2), 1),
                                         ((4, 5, 8, 3, 2), 3),
                                         ((2, 7, 10, 3, 2), 5)])
def test_canonicalize_postconditions(params, seed):
    rd = inst.gen_rd(*params, seed=seed)
    can = inst.canonicalize(rd)
    fld = can.field
    k, n = can.k, can.n
    assert (can.gen[:, :k] == ml.identity(k)).all()
    assert not can.received[:k].any() and can.received[k] == 1
    assert (can.h_y[:, k + 1:] == ml.identity(n - k - 1)).all()
    assert can.h[k] == 1 and not can.h[k + 1:].any()
    # defining orthogonality relations
    assert not ml.matmul(fld, can.gen, can.h_y.T).any()
    assert not ml.matmul(fld, can.received[None, :], can.h_y.T).any()
    assert ml.matmul(fld, can.received[None, :], can.h[:, None])[0, 0] == 1
    # transported witness still has the right weight
    assert ml.rank_weight(fld, can.witness.error) == rd.r


def test_canonicalize_transport_round_trip():
    rd = inst.gen_rd(2, 7, 8, 4, 2, seed=4)
    for perm_seed in (None, 3, 11):
        can = inst.canonicalize(rd, perm_seed=perm_seed)
        back = can.error_to_origin(can.witness.error)
        assert (back == rd.witness.error).all()
        again = can.error_from_origin(back)
        assert (again == can.witness.error).all()


def test_canonicalize_rejects_codeword():
    rd = inst.gen_rd(2, 3, 6, 2, 0, seed=2)
    with pytest.raises(inst.InstanceError):
        inst.canonicalize(rd)


def test_shorten_trivial_cases():
    rd = inst.gen_rd(2, 3, 10, 4, 1, seed=3)
    sh = inst.shorten(rd.field, rd.gen, [])
    assert sh.dim == 4
    sh_all = inst.shorten(rd.field, rd.gen, list(range(10)))
    assert sh_all.dim == 0


def test_shorten_block_shape():
    # generic [10, 4] code shortened at two positions: dimension 2 and the
    # documented block decomposition of the transformed generator
    rd = inst.gen_rd(2, 3, 10, 4, 1, seed=3)
    fld = rd.field
    sh = inst.shorten(fld, rd.gen, [7, 9])
    assert sh.dim == 2 and sh.b_block is not None
    tg = ml.matmul(fld, sh.transform, rd.gen)
    j, comp = list(sh.positions), list(sh.complement)
    assert not tg[:2][:, j].any()
    assert (tg[:2][:, comp] == sh.gen_short).all()
    assert (tg[2:][:, j] == ml.identity(2)).all()
    assert (tg[2:][:, comp] == sh.b_block).all()
    assert ml.echelonize(fld, sh.transform).rank == 4


def test_puncture():
    rd = inst.gen_rd(2, 7, 10, 3, 2, seed=4)
    assert inst.puncture_rd(rd, 0) is rd
    rp = inst.puncture_rd(rd, 2)
    assert rp.n == 8 and rp.k == 3
    if rp.witness is not None:
        assert rp.verify_witness()
    with pytest.raises(inst.InstanceError):
        inst.puncture_rd(rd, 7)


def test_rd_to_minrank():
    rd = inst.gen_rd(2, 7, 8, 4, 2, seed=1)
    mr = inst.rd_to_minrank(rd)
    assert mr.K == 28 and mr.m == 7 and mr.n == 8
    assert all(mi.shape == (7, 8) for mi in mr.mats)
    assert mr.verify_witness()
    # the combination at the witness reproduces the coordinate expansion
    # of the error: Mat(y + x G) = S C
    e_mat = mr.low_rank_matrix(mr.witness)
    assert (e_mat == ml.mat_of(rd.field, rd.witness.error)).all()
    smat = ml.mat_of(rd.field, rd.witness.support)
    rhs = ml.matmul(rd.field.base, smat, rd.witness.coeffs)
    assert (e_mat == rhs).all()


def test_gen_minrank():
    mi = inst.gen_minrank(2, 6, 8, 14, 2, seed=7)
    assert mi.verify_witness()
    assert ml.echelonize(mi.field, mi.low_rank_matrix(mi.witness)).rank == 2
    with pytest.raises(inst.InstanceError):
        inst.gen_minrank(2, 6, 8, 0, 2, seed=1)
    with pytest.raises(inst.InstanceError):
        inst.gen_minrank(2, 6, 8, 5, 7, seed=1)


def test_minrank_generator_roundtrip():
    mi = inst.gen_minrank(2, 4, 5, 6, 2, seed=9)
    rows = np.stack([inst.flatten_matrix(m) for m in mi.mats[1:]])
    for i in range(mi.K):
        assert (inst.unflatten_matrix(rows[i], mi.m) == mi.mats[i + 1]).all()


def test_minrank_systematic():
    mi = inst.gen_minrank(2, 6, 8, 14, 2, seed=7)
    gm, reduced = inst.minrank_systematic(mi)
    assert len(gm.pivots) == 14
    m0f = inst.flatten_matrix(reduced.mats[0])
    assert not m0f[list(gm.pivots)].any()
    assert reduced.verify_witness()
    # the systematic entries of the low-rank matrix are the variables
    e = reduced.low_rank_matrix(reduced.witness)
    ef = inst.flatten_matrix(e)
    assert (ef[list(gm.pivots)] == reduced.witness).all()


def test_minrank_systematic_single_matrix():
    # K = 1: the lone matrix is normalized to have leading entry 1
    mi = inst.gen_minrank(2, 3, 4, 1, 1, seed=11)
    gm, reduced = inst.minrank_systematic(mi)
    assert len(gm.pivots) == 1
    first = inst.flatten_matrix(reduced.mats[1])
    assert first[gm.pivots[0]] == 1 and not first[:gm.pivots[0]].any()


def test_minrank_systematic_degenerate():
    fld = inst.gen_minrank(2, 3, 4, 1, 1, seed=1).field
    z = np.zeros((3, 4), dtype=np.int64)
    bad = inst.MinRankInstance(fld, 3, 4, 2, 1, (z, z, z), None)
    with pytest.raises(inst.InstanceError):
        inst.minrank_systematic(bad)
