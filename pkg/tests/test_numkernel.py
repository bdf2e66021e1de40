import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import crandn, oracle_matrix
from opfactor.numkernel import (
    as_matrix,
    fft,
    fro,
    hermitian_eig,
    householder_qr,
    ifft,
    matrix_from_json,
    matrix_to_json,
    numeric_rank,
    singular_values,
    svd,
    unitary_exponential,
)
from opfactor.suites import random_unitary

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 8)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix([1, 2, 3])
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])


def test_qr_identity_and_unit_column():
    Q, R = householder_qr(np.eye(3))
    assert np.allclose(Q, np.eye(3)) and np.allclose(R, np.eye(3))
    Q, R = householder_qr([[0], [1]])
    assert np.allclose(Q, [[0], [1]]) and np.allclose(R, [[1]])


@given(seeds, dims, dims)
def test_qr_properties(seed, m, n):
    rng = np.random.default_rng(seed)
    M = crandn(rng, m, n)
    Q, R = householder_qr(M)
    k = min(m, n)
    assert Q.shape == (m, k) and R.shape == (k, n)
    assert fro(M - Q @ R) <= max(m, n) * 1e-12 * fro(M)
    assert fro(Q.conj().T @ Q - np.eye(k)) < 1e-12 * k
    assert np.allclose(np.tril(R, -1), 0)
    d = np.diag(R)
    assert np.all(d.real >= 0) and np.all(d.imag == 0)


def test_eig_small_cases():
    assert np.allclose(hermitian_eig(np.diag([2.0, 1.0])).eigenvalues, [1, 2])
    assert np.allclose(hermitian_eig([[0, 1], [1, 0]]).eigenvalues, [-1, 1])
    with pytest.raises(ValueError):
        hermitian_eig([[0, 1], [0, 0]])


def test_eig_matches_lapack_oracle(oracles):
    o = oracles["eig_6x6"]
    H = oracle_matrix(o["H"])
    ed = hermitian_eig(H)
    assert np.max(np.abs(ed.eigenvalues - np.array(o["eigenvalues"]))) < 1e-12
    assert abs(np.trace(H).real - ed.eigenvalues.sum()) < 1e-10


@given(seeds, st.integers(1, 32))
def test_eig_invariants(seed, n):
    rng = np.random.default_rng(seed)
    X = crandn(rng, n, n)
    H = (X + X.conj().T) / 2
    ed = hermitian_eig(H)
    V = ed.vectors
    assert np.all(np.diff(ed.eigenvalues) >= 0)
    assert fro(V.conj().T @ V - np.eye(n)) <= n * 1e-12
    assert fro(H @ V - V * ed.eigenvalues) <= n * 1e-10 * fro(H)


def test_eig_is_deterministic():
    rng = np.random.default_rng(3)
    X = crandn(rng, 7, 7)
    H = X + X.conj().T
    a, b = hermitian_eig(H), hermitian_eig(H.copy())
    assert np.array_equal(a.vectors, b.vectors)


def test_svd_small_cases():
    assert np.allclose(svd(np.diag([3.0, 0.0])).singular_values, [3, 0])
    assert np.allclose(svd([[0, 1], [0, 0]]).singular_values, [1, 0])


@pytest.mark.parametrize("key", ["svd_4x4", "svd_5x3"])
def test_svd_matches_lapack_oracle(oracles, key):
    o = oracles[key]
    M = oracle_matrix(o["M"])
    assert np.max(np.abs(svd(M).singular_values - np.array(o["sigma"]))) < 1e-12
    assert np.max(np.abs(singular_values(M.T) - np.array(o["sigma"]))) < 1e-12


@given(seeds, dims, dims, st.integers(0, 8))
def test_svd_invariants(seed, m, n, r):
    rng = np.random.default_rng(seed)
    r = min(r, m, n)
    M = crandn(rng, m, r) @ crandn(rng, r, n) if r else crandn(rng, m, n) * 1e-3
    d = svd(M)
    U, s, V = d.U, d.singular_values, d.V
    dim = max(m, n)
    assert fro(U.conj().T @ U - np.eye(m)) <= 1e-12 * dim * 10
    assert fro(V.conj().T @ V - np.eye(n)) <= 1e-12 * dim * 10
    S = np.zeros((m, n))
    S[: s.size, : s.size] = np.diag(s)
    assert fro(M - U @ S @ V.conj().T) <= dim * 1e-10 * fro(M)
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    assert abs(fro(M) ** 2 - np.sum(s**2)) < 1e-10 * max(1, fro(M) ** 2)


@given(seeds, dims, dims)
def test_svd_unitary_invariance(seed, m, n):
    rng = np.random.default_rng(seed)
    M = crandn(rng, m, n)
    s1 = singular_values(M)
    s2 = singular_values(random_unitary(rng, m) @ M @ random_unitary(rng, n))
    assert np.max(np.abs(s1 - s2)) < 1e-10


def test_svd_phase_convention():
    rng = np.random.default_rng(11)
    d = svd(crandn(rng, 4, 3))
    for j in range(4):
        u = d.U[:, j]
        first = u[np.argmax(np.abs(u) > 1e-12)]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_numeric_rank():
    assert numeric_rank(np.zeros((3, 3))) == 0
    assert numeric_rank([[0, 1], [0, 0]]) == 1
    rng = np.random.default_rng(5)
    assert numeric_rank(crandn(rng, 5, 2) @ crandn(rng, 2, 5)) == 2
    assert numeric_rank(np.diag([1.0, 1e-3]), tol=1e-2) == 1


def test_unitary_exponential():
    H = np.diag([1.0, -2.0])
    assert np.allclose(unitary_exponential(H, 0.0), np.eye(2))
    assert np.allclose(unitary_exponential([[np.pi]], 1.0), [[-1]])
    with pytest.raises(ValueError):
        unitary_exponential([[0, 1], [0, 0]], 1.0)


@given(seeds, st.integers(1, 6), st.floats(-3, 3), st.floats(-3, 3))
def test_unitary_group_law(seed, n, s, t):
    rng = np.random.default_rng(seed)
    X = crandn(rng, n, n)
    H = X + X.conj().T
    Us, Ut = unitary_exponential(H, s), unitary_exponential(H, t)
    assert fro(Us @ Ut - unitary_exponential(H, s + t)) < 1e-9
    assert fro(Us.conj().T @ Us - np.eye(n)) < 1e-10 * n


def test_fft_small_cases():
    assert np.allclose(fft([1, 1, 1, 1]), [4, 0, 0, 0])
    assert np.allclose(fft([1, 0, 0, 0]), [1, 1, 1, 1])
    with pytest.raises(ValueError):
        fft([1, 2, 3])


def test_fft_matches_numpy_oracle(oracles):
    o = oracles["fft_16"]
    v = oracle_matrix(o["v"])[:, 0]
    ref = np.array([complex(a, b) for a, b in o["fft"]])
    assert np.max(np.abs(fft(v) - ref)) < 1e-12
    assert abs(np.linalg.norm(fft(v)) ** 2 - 16 * np.linalg.norm(v) ** 2) < 1e-10 * 16 * np.linalg.norm(v) ** 2


@given(seeds, st.integers(1, 10))
def test_fft_roundtrip_and_parseval(seed, k):
    n = 2**k
    v = crandn(np.random.default_rng(seed), n)
    assert np.linalg.norm(ifft(fft(v)) - v) <= 1e-12 * np.linalg.norm(v)
    assert abs(np.linalg.norm(fft(v)) ** 2 - n * np.linalg.norm(v) ** 2) <= 1e-10 * n * np.linalg.norm(v) ** 2


def test_matrix_json_roundtrip():
    M = np.array([[1 + 2j, 0], [3, -1j]])
    obj = matrix_to_json(M)
    assert obj["rows"] == 2 and obj["cols"] == 2 and obj["data"][0] == [1.0, 2.0]
    assert np.array_equal(matrix_from_json(obj), M)
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[0, 0]]})
    with pytest.raises(ValueError):
        matrix_from_json({"rows": 1})
