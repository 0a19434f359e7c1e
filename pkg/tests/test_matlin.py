"""Exact linear algebra, subset indexing, minors, coordinate expansion."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ranklab import matlin as ml
from ranklab.galois import make_base_field, make_ext_field

F2 = make_base_field(2)
F4 = make_base_field(4)
F8 = make_ext_field(2, 3)
F9 = make_base_field(9)


def test_echelon_examples():
    res = ml.echelonize(F2, ml.identity(3))
    assert res.rank == 3 and res.kernel.shape[0] == 0
    res = ml.echelonize(F2, np.zeros((2, 4), dtype=np.int64))
    assert res.rank == 0 and res.kernel.shape[0] == 4
    res = ml.echelonize(F2, ml.matrix_from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]]))
    assert res.rank == 2
    assert res.kernel.shape == (1, 3) and (res.kernel[0] == [1, 1, 1]).all()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30 - 1), st.integers(2, 6), st.integers(2, 6))
def test_packed_matches_generic_gf2(bits, rows, cols):
    rng = np.random.default_rng(bits)
    mat = rng.integers(0, 2, (rows, cols))
    packed = ml.echelonize(F2, mat)
    generic = ml.echelonize(F2, mat, force_generic=True)
    assert packed.rank == generic.rank
    assert (packed.rref == generic.rref).all()
    assert packed.pivots == generic.pivots


@pytest.mark.parametrize("fld", [F2, F4, F8, F9], ids=str)
def test_kernel_annihilates(fld):
    rng = np.random.default_rng(17)
    mat = fld.rand_elements(rng, (5, 8))
    res = ml.echelonize(fld, mat)
    assert res.rank + res.kernel.shape[0] == 8
    assert not ml.matmul(fld, mat, res.kernel.T).any()


def test_rank_invariance_under_transforms():
    rng = np.random.default_rng(23)
    mat = F8.rand_elements(rng, (4, 7))
    rank = ml.echelonize(F8, mat).rank
    left = ml.random_invertible(F8, 4, rng)
    right = ml.random_invertible(F8, 7, rng)
    assert ml.echelonize(F8, ml.matmul(F8, left, mat)).rank == rank
    assert ml.echelonize(F8, ml.matmul(F8, mat, right)).rank == rank
    perm = rng.permutation(7)
    assert ml.echelonize(F8, mat[:, perm]).rank == rank


def test_solve_right():
    rng = np.random.default_rng(29)
    mat = F8.rand_elements(rng, (6, 4))
    v = F8.rand_elements(rng, 4)
    rhs = ml.matmul(F8, mat, v[:, None])[:, 0]
    sol = ml.solve_right(F8, mat, rhs)
    assert sol is not None
    assert (ml.matmul(F8, mat, sol[:, None])[:, 0] == rhs).all()
    assert ml.solve_right(F2, np.zeros((2, 2), dtype=np.int64),
                          np.array([1, 0])) is None


def test_subset_order_examples():
    # single subset when n = r
    assert ml.subset_rank(3, (0, 1, 2)) == 0
    assert ml.subset_unrank(3, 3, 0) == (0, 1, 2)
    # order on pairs from a 3-set: {2,3} > {1,3} > {1,2} (1-based)
    assert [ml.subset_rank(3, t) for t in [(0, 1), (0, 2), (1, 2)]] == [0, 1, 2]
    with pytest.raises(ValueError):
        ml.subset_rank(3, (1, 1))
    with pytest.raises(ValueError):
        ml.subset_rank(3, (0, 3))


def test_subset_round_trip():
    subs = ml.all_subsets(6, 3)
    assert len(subs) == 20
    for i, t in enumerate(subs):
        assert ml.subset_rank(6, t) == i
        assert ml.subset_unrank(6, 3, i) == t


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.data())
def test_subset_bijection_random(n, data):
    r = data.draw(st.integers(0, n))
    from math import comb
    i = data.draw(st.integers(0, comb(n, r) - 1))
    assert ml.subset_rank(n, ml.subset_unrank(n, r, i)) == i


def test_minors_identity_block():
    mat = np.concatenate([ml.identity(3), np.zeros((3, 2), dtype=np.int64)], axis=1)
    minors = ml.maximal_minors(F4, mat, 3)
    assert minors[ml.subset_rank(5, (0, 1, 2))] == 1
    assert minors.sum() == 1


def test_minors_scaling_r1():
    # r = 1: minors are the entries, so row scaling scales all minors
    rng = np.random.default_rng(31)
    row = F8.rand_elements(rng, (1, 6))
    lam = 5
    scaled = F8.mul_arr(lam, row)
    assert (ml.maximal_minors(F8, scaled, 1)
            == F8.mul_arr(lam, ml.maximal_minors(F8, row, 1))).all()


def test_minors_match_determinants():
    rng = np.random.default_rng(37)
    mat = F8.rand_elements(rng, (3, 6))
    minors = ml.maximal_minors(F8, mat, 3)
    for i, t in enumerate(ml.all_subsets(6, 3)):
        assert minors[i] == ml.determinant(F8, mat[:, list(t)])


def test_cauchy_binet_exhaustive_gf2():
    # det(A B) = sum over column subsets of paired maximal minors
    rng = np.random.default_rng(41)
    b = rng.integers(0, 2, (3, 2))
    bt_minors = ml.maximal_minors(F2, np.ascontiguousarray(b.T), 2)
    for code in range(2 ** 6):
        a = np.array([[(code >> i) & 1 for i in range(3)],
                      [(code >> (3 + i)) & 1 for i in range(3)]], dtype=np.int64)
        lhs = ml.determinant(F2, ml.matmul(F2, a, b))
        a_minors = ml.maximal_minors(F2, a, 2)
        rhs = 0
        for t in range(3):
            rhs = F2.add(rhs, F2.mul(int(a_minors[t]), int(bt_minors[t])))
        assert lhs == rhs


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**30 - 1))
def test_cauchy_binet_random_f8(seed):
    rng = np.random.default_rng(seed)
    a = F8.rand_elements(rng, (2, 5))
    b = F8.rand_elements(rng, (5, 2))
    lhs = ml.determinant(F8, ml.matmul(F8, a, b))
    am = ml.maximal_minors(F8, a, 2)
    bm = ml.maximal_minors(F8, np.ascontiguousarray(b.T), 2)
    rhs = 0
    for t in range(len(am)):
        rhs = F8.add(rhs, F8.mul(int(am[t]), int(bm[t])))
    assert lhs == rhs


def test_pluecker_well_defined():
    # minors of A C equal det(A) times minors of C, entrywise
    rng = np.random.default_rng(43)
    cmat = F8.rand_elements(rng, (3, 6))
    amat = ml.random_invertible(F8, 3, rng)
    lhs = ml.maximal_minors(F8, ml.matmul(F8, amat, cmat), 3)
    rhs = F8.mul_arr(ml.determinant(F8, amat), ml.maximal_minors(F8, cmat, 3))
    assert (lhs == rhs).all()


def test_mat_of_vec_of():
    rng = np.random.default_rng(47)
    x = F8.rand_elements(rng, 5)
    mat = ml.mat_of(F8, x)
    assert mat.shape == (3, 5)
    assert (ml.vec_of(F8, mat) == x).all()
    assert ml.rank_weight(F8, np.zeros(4, dtype=np.int64)) == 0
    # entries in the base field span at most one dimension
    assert ml.rank_weight(F8, np.array([1, 0, 1, 1])) <= 1


def test_rank_weight_equals_support_dimension():
    rng = np.random.default_rng(53)
    for _ in range(5):
        x = F8.rand_elements(rng, 5)
        # dimension of the span of the entries, via coordinate vectors
        coords = np.stack([np.array(F8.coeffs(int(v))) for v in x])
        dim = ml.echelonize(F2, coords).rank
        assert ml.rank_weight(F8, x) == dim


def test_laplace_limit_path():
    # force the Gaussian fallback and compare against the memoized path
    rng = np.random.default_rng(59)
    mat = F2.rand_elements(rng, (7, 9))
    fast = ml.maximal_minors(F2, mat, 7)           # r > limit: Gaussian
    assert len(fast) == 36
    for i, t in enumerate(ml.all_subsets(9, 7)):
        assert fast[i] == ml.determinant(F2, mat[:, list(t)])


def test_dump_triplets():
    mat = np.array([[1, 0], [0, 2]])
    text = ml.dump_triplets(mat, ["r0", "r1"], ["c0", "c1"])
    assert text == "r0\tc0\t1\nr1\tc1\t2\n"
    assert ml.dump_triplets(np.zeros((1, 1)), ["r"], ["c"]) == ""
