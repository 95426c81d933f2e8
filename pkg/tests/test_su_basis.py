from __future__ import annotations

import numpy as np
import pytest

from src.errors import DimensionError
from src.su_basis import antisym_range, antisym_slice, build_basis

DIMS = [2, 3, 4, 5]


@pytest.mark.parametrize("d", DIMS)
def test_generators_hermitian_traceless_orthogonal(d):
    basis = build_basis(d)
    assert len(basis) == d * d - 1
    for g in basis.generators:
        assert np.max(np.abs(g - g.conj().T)) < 1e-12
        assert abs(np.trace(g)) < 1e-12
    np.testing.assert_allclose(basis.gram(), 2 * np.eye(d * d - 1), atol=1e-12)


@pytest.mark.parametrize("d", DIMS)
def test_antisymmetric_range_is_exactly_the_transpose_negated_block(d):
    basis = build_basis(d)
    lo, hi = antisym_range(d)
    assert (lo, hi) == (d * (d + 1) // 2, d * d - 1)
    assert hi - lo + 1 == d * (d - 1) // 2
    for i in range(1, d * d):
        g = basis.generator(i)
        if lo <= i <= hi:
            np.testing.assert_array_equal(g.T, -g)
            assert basis.kind(i) == "antisymmetric"
        else:
            np.testing.assert_array_equal(g.T, g)


def test_qubit_basis_is_pauli_in_fixed_order():
    b = build_basis(2)
    np.testing.assert_array_equal(b.generator(1), np.diag([1, -1]))  # z
    np.testing.assert_array_equal(b.generator(2), np.array([[0, 1], [1, 0]]))  # x
    np.testing.assert_array_equal(b.generator(3), np.array([[0, -1j], [1j, 0]]))  # y
    assert antisym_range(2) == (3, 3)


def test_qutrit_order():
    b = build_basis(3)
    assert [b.kind(i) for i in range(1, 9)] == ["diagonal"] * 2 + ["symmetric"] * 3 + ["antisymmetric"] * 3
    assert b.pairs == ((0, 1), (0, 2), (1, 2))
    np.testing.assert_allclose(b.generator(2), np.diag([1, 1, -2]) / np.sqrt(3), atol=1e-15)
    assert b.generator(7)[0, 2] == -1j
    assert b.generator(7)[2, 0] == 1j


def test_with_identity_prepends_identity():
    ops = build_basis(3).with_identity()
    assert ops.shape == (9, 3, 3)
    np.testing.assert_array_equal(ops[0], np.eye(3))


def test_antisym_slice_is_zero_based():
    s = antisym_slice(3)
    assert (s.start, s.stop) == (5, 8)


def test_basis_is_cached_and_read_only():
    assert build_basis(4) is build_basis(4)
    with pytest.raises(ValueError):
        build_basis(4).stack[0, 0, 0] = 0


@pytest.mark.parametrize("d", [0, 1, -3])
def test_bad_dimension(d):
    with pytest.raises(DimensionError):
        build_basis(d)
    with pytest.raises(DimensionError):
        antisym_range(d)


def test_generator_index_range():
    with pytest.raises(IndexError):
        build_basis(2).generator(0)
    with pytest.raises(IndexError):
        build_basis(2).generator(4)
