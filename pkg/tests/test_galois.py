"""Field tower arithmetic, trace/dual-basis machinery, unfolding."""

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ranklab.galois import (FieldElem, make_base_field, make_ext_field,
                            prime_power, unfold_system)

F4 = make_ext_field(2, 2)
F8 = make_ext_field(2, 3)
F45 = make_ext_field(4, 5)
FIELDS = [make_base_field(2), make_base_field(3), F4, F8,
          make_base_field(9), F45]


def test_prime_power():
    assert prime_power(16) == (2, 4)
    assert prime_power(27) == (3, 3)
    assert prime_power(7) == (7, 1)
    for bad in (1, 6, 12):
        with pytest.raises(ValueError):
            prime_power(bad)


def test_deterministic_moduli():
    assert F4.modulus == (1, 1, 1)          # z^2 + z + 1
    assert F8.modulus == (1, 1, 0, 1)       # z^3 + z + 1
    assert make_ext_field(2, 2) is F4       # cached handle


def test_trivial_extension():
    f = make_ext_field(2, 1)
    assert f.order == 2
    assert f.basis == (1,) and f.dual_basis() == (1,)
    assert f.trace(1) == 1                  # trace is the identity on F_2


def test_trace_examples():
    # char 2: tr(1) = 1 + 1 = 0; tr(a) = a + a^2 = a + (a+1) = 1
    assert F4.trace(0) == 0
    assert F4.trace(1) == 0
    assert F4.trace(2) == 1


def test_dual_basis_f4():
    # basis (1, a) has dual (a^2, 1) = (codes 3, 1)
    assert F4.dual_basis() == (3, 1)


def test_dual_basis_pairing_f8():
    duals = F8.dual_basis()
    for i, bi in enumerate(F8.basis):
        for j, bj in enumerate(duals):
            assert F8.trace(F8.mul(bi, bj)) == (1 if i == j else 0)


def test_coordinate_recovery():
    # trace against the dual basis reads off polynomial-basis coordinates
    for x in range(F8.order):
        assert F8.unfold_coeff(x) == F8.coeffs(x)


def test_relative_trace_of_tower():
    assert F45.base.order == 4
    for x in (0, 1, 5, 777, 1000):
        t = F45.trace(x)
        assert 0 <= t < 4


@pytest.mark.parametrize("fld", FIELDS, ids=str)
def test_field_axioms(fld):
    rng = np.random.default_rng(7)
    xs = rng.integers(0, fld.order, 12)
    for a, b, c in zip(xs, xs[4:], xs[8:]):
        a, b, c = int(a), int(b), int(c)
        assert fld.mul(a, fld.add(b, c)) == fld.add(fld.mul(a, b), fld.mul(a, c))
        assert fld.add(a, fld.neg(a)) == 0
        assert fld.sub(a, b) == fld.add(a, fld.neg(b))
        if a:
            assert fld.mul(a, fld.inv(a)) == 1
            assert fld.pow(a, fld.order - 1) == 1


@pytest.mark.parametrize("fld", [F4, F8, F45], ids=str)
def test_frobenius(fld):
    rng = np.random.default_rng(3)
    q = fld.base.order
    for x in rng.integers(0, fld.order, 6):
        x = int(x)
        assert fld.frobenius(x, 0) == x
        assert fld.frobenius(x, fld.degree) == x
        assert fld.frobenius(x, 1) == fld.pow(x, q)
    for c in range(q):                       # the base field is fixed
        assert fld.frobenius(c, 1) == c


@given(st.integers(0, F8.order - 1), st.integers(0, F8.order - 1),
       st.integers(0, 1))
def test_trace_linearity(x, y, lam):
    lhs = F8.trace(F8.add(F8.mul(lam, x), y))
    rhs = F8.base.add(F8.base.mul(lam, F8.trace(x)), F8.trace(y))
    assert lhs == rhs


def test_array_ops_match_scalar():
    rng = np.random.default_rng(11)
    for fld in (F8, F45, make_base_field(9)):
        a = fld.rand_elements(rng, (3, 4))
        b = fld.rand_elements(rng, (3, 4))
        mul = fld.mul_arr(a, b)
        add = fld.add_arr(a, b)
        for i in range(3):
            for j in range(4):
                assert mul[i, j] == fld.mul(int(a[i, j]), int(b[i, j]))
                assert add[i, j] == fld.add(int(a[i, j]), int(b[i, j]))
        tr = fld.trace_arr(a)
        for i in range(3):
            for j in range(4):
                assert tr[i, j] == fld.trace(int(a[i, j]))


def test_trace_commutes_with_base_field_matrices():
    # applying the trace entrywise commutes with left multiplication by a
    # base-field matrix
    from ranklab import matlin as ml
    rng = np.random.default_rng(19)
    cmat = rng.integers(0, 2, (2, 3))
    m = F8.rand_elements(rng, (3, 4))
    lhs = F8.trace_arr(ml.matmul(F8, cmat, m))
    rhs = ml.matmul(F8.base, cmat, F8.trace_arr(m))
    assert (lhs == rhs).all()


def test_field_elem_wrapper():
    a = FieldElem(F8, 3)
    b = FieldElem(F8, 5)
    assert (a + b).code == F8.add(3, 5)
    assert (a * b).code == F8.mul(3, 5)
    assert (a - b + b).code == a.code
    assert a.inverse().code == F8.inv(3)
    assert (a ** 7).code == 1
    assert a.trace().field is F8.base or a.trace().field is F8
    assert a.coeffs == F8.coeffs(3)
    with pytest.raises(ValueError):
        FieldElem(F8, 9)


def test_order_limit_guard():
    with pytest.raises(ValueError):
        make_ext_field(2, 73)


def test_unfold_footnote_example():
    # f = b1 z1 + b2 z2 over the quadratic extension unfolds to {z1, z2}
    b1, b2 = F4.basis
    out = unfold_system([{(1, 0): b1, (0, 1): b2}], F4)
    assert out == [{(1, 0): 1}, {(0, 1): 1}]


def test_unfold_base_coefficients():
    # coefficients already in the base field: component i is scaled by
    # trace(b*_i), so the joint solution set over F_q is unchanged
    f = {(1, 0): 1, (0, 1): 1}
    out = unfold_system([f], F4)
    assert len(out) == 2
    duals = F4.dual_basis()
    for i, comp in enumerate(out):
        scale = F4.trace(duals[i])
        expect = {e: c for e, c in ((e, F4.base.mul(scale, v))
                                    for e, v in f.items()) if c}
        assert comp == expect


def test_unfold_preserves_solution_sets():
    # exhaustive check: base-field roots of f = common roots of components
    rng = np.random.default_rng(5)
    f = {tuple(e): int(c) for e, c in zip(
        itertools.product(range(2), repeat=3),
        rng.integers(0, 8, 8)) if c}
    comps = unfold_system([f], F8)
    for assign in itertools.product(range(2), repeat=3):
        val = 0
        for expo, c in f.items():
            term = c
            for e, x in zip(expo, assign):
                if e and not x:
                    term = 0
            val = F8.add(val, term)
        comp_vals = []
        for comp in comps:
            v = 0
            for expo, c in comp.items():
                term = c
                for e, x in zip(expo, assign):
                    if e and not x:
                        term = 0
                v = F8.base.add(v, term)
            comp_vals.append(v)
        assert (val == 0) == all(v == 0 for v in comp_vals)


def test_unfold_reduces_exponents():
    # z^q collapses onto z for base-field-valued variables
    out = unfold_system([{(2,): 1}], F4)   # z^2 over F_4 in an F_2 variable
    assert all(set(comp) <= {(1,)} for comp in out)
