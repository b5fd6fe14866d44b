import numpy as np
import pytest
from hypothesis import given, strategies as st

from gwfradar.forward import cross_correlate, simulate_receiver_data
from gwfradar.oracle import build_dense, dense_backprojection

from conftest import make_setup


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_forward_zero(small):
    *_, op = small
    assert not np.any(op.forward_rank1(np.zeros(op.K)).values)


def test_unit_pixel_modulus(small):
    *_, op = small
    e = np.zeros(op.K)
    e[4] = 1
    np.testing.assert_allclose(np.abs(op.forward_rank1(e).values), op.scale, rtol=1e-13)


def test_forward_matches_pipeline(small, rng):
    *_, op = small
    rho = rng.standard_normal(op.K)
    direct = cross_correlate(simulate_receiver_data(rho, op.vectors)).values
    assert rel(op.forward_rank1(rho).values, direct) < 1e-12


def test_forward_matches_dense(small, rng):
    *_, op = small
    rho = rng.standard_normal(op.K)
    dense = build_dense(op)
    assert rel(op.forward_rank1(rho).values, dense.apply(np.outer(rho, rho))) < 1e-12


def test_general_forward_on_rank1(small, rng):
    *_, op = small
    rho = rng.standard_normal(op.K)
    assert rel(op.forward(np.outer(rho, rho)), op.forward_rank1(rho).values) < 1e-12


def test_adjoint_zero(small, rng):
    *_, op = small
    out = op.adjoint_apply(np.zeros(op.data_length), rng.standard_normal(op.K))
    assert not np.any(out)


def test_adjoint_identity(small, rng):
    *_, op = small
    for _ in range(5):
        A = rng.standard_normal((op.K, op.K))
        X = A + A.T
        e = rng.standard_normal(op.data_length) + 1j * rng.standard_normal(op.data_length)
        lhs = np.vdot(e, op.forward(X)).real
        G = np.column_stack([op.adjoint_apply(e, c) for c in np.eye(op.K)])
        assert abs(lhs - np.sum(X * G)) <= 1e-10 * abs(lhs)


def test_adjoint_parallel_to_dense(small, rng):
    *_, op = small
    rho = rng.standard_normal(op.K)
    e = op.forward_rank1(rho).values
    ref = dense_backprojection(build_dense(op), e) @ rho
    assert rel(op.adjoint_apply(e, rho), ref) < 1e-10


def test_backprojection_matches_dense(small, rng):
    *_, op = small
    d = op.forward_rank1(rng.standard_normal(op.K))
    Xhat = dense_backprojection(build_dense(op), d.values)
    v = rng.standard_normal(op.K)
    assert rel(op.backprojection_matvec(d, v), Xhat @ v) < 1e-10
    assert not np.any(op.backprojection_matvec(np.zeros(op.data_length), v))


def test_backprojection_symmetric(small, rng):
    *_, op = small
    d = rng.standard_normal(op.data_length) + 1j * rng.standard_normal(op.data_length)
    u, v = rng.standard_normal((2, op.K))
    a = u @ op.backprojection_matvec(d, v)
    b = op.backprojection_matvec(d, u) @ v
    assert abs(a - b) <= 1e-10 * max(abs(a), 1e-300)


def test_dimension_errors(small):
    *_, op = small
    with pytest.raises(ValueError):
        op.adjoint_apply(np.zeros(op.data_length + 1), np.zeros(op.K))
    with pytest.raises(ValueError):
        op.adjoint_apply(np.zeros(op.data_length), np.zeros(op.K + 1))
    with pytest.raises(ValueError):
        op.forward(np.zeros((op.K, op.K + 1)))


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**31))
def test_adjoint_linear_in_e(a, b, seed):
    *_, op = make_setup(K=4, N=3, M=4)
    r = np.random.default_rng(seed)
    e1, e2 = r.standard_normal((2, op.data_length)) + 1j * r.standard_normal((2, op.data_length))
    rho = r.standard_normal(op.K)
    lhs = op.adjoint_apply(a * e1 + b * e2, rho)
    rhs = a * op.adjoint_apply(e1, rho) + b * op.adjoint_apply(e2, rho)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(rhs).max()))


@given(st.floats(-4, 4), st.integers(0, 2**31))
def test_forward_quadratic(c, seed):
    *_, op = make_setup(K=4, N=3, M=4)
    rho = np.random.default_rng(seed).standard_normal(op.K)
    np.testing.assert_allclose(op.forward_rank1(c * rho).values, c**2 * op.forward_rank1(rho).values,
                               atol=1e-12 * (1 + c**2))


@given(st.sampled_from([4, 9, 16]), st.integers(3, 5), st.sampled_from([4, 8]), st.integers(0, 2**31))
def test_matrix_free_vs_dense_random(K, N, M, seed):
    *_, op = make_setup(K=K, N=N, M=M)
    rho = np.random.default_rng(seed).standard_normal(K)
    assert rel(op.forward_rank1(rho).values, build_dense(op).apply(np.outer(rho, rho))) < 1e-12


def _count_iteration(K, N, M):
    *_, op = make_setup(K=K, N=N, M=M)
    rho = np.ones(K)
    z = op.linear_terms(rho)
    e = op.correlate_terms(z)
    op.adjoint_apply(e, rho, z)
    return op.multiplications


@pytest.mark.parametrize("K,N,M", [(16, 4, 8), (64, 4, 8), (16, 8, 8), (16, 4, 32), (100, 6, 16)])
def test_multiplication_count(K, N, M):
    # forward + adjoint pair: 2 N M K for linear terms and the final sum, 6 M C(N,2) for pair products
    P = N * (N - 1) // 2
    assert _count_iteration(K, N, M) == 2 * N * M * K + 6 * P * M


def test_multiplication_count_linear_in_k_and_m():
    a, b, c = (_count_iteration(K, 4, 8) for K in (16, 64, 144))
    assert (c - b) * (64 - 16) == (b - a) * (144 - 64)
    assert _count_iteration(16, 4, 32) == 4 * _count_iteration(16, 4, 8)
