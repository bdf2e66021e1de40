import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import opfactor.operators as op
from conftest import crandn
from opfactor.numkernel import fro
from opfactor.suites import (
    PATTERNS,
    commuting_hermitian_general,
    hermitian_pair,
    random_hermitian,
    random_unitary,
    stability_pair,
)

NIL = np.array([[0, 1], [0, 0]], dtype=complex)
seeds = st.integers(0, 2**32 - 1)


def test_polar_examples():
    rng = np.random.default_rng(0)
    U = random_unitary(rng, 3)
    pd = op.polar(U)
    assert fro(pd.V - U) < 1e-12 and fro(pd.H - np.eye(3)) < 1e-12
    pd = op.polar(NIL)
    assert fro(pd.H - np.diag([0, 1])) < 1e-15
    assert fro(pd.V - np.array([[0, 1], [0, 0]])) < 1e-15


@given(seeds, st.integers(1, 6), st.integers(0, 6))
def test_polar_invariants(seed, n, r):
    rng = np.random.default_rng(seed)
    r = min(r, n)
    T = crandn(rng, n, r) @ crandn(rng, r, n) if r < n else crandn(rng, n, n)
    pd = op.polar(T)
    res = op.polar_invariant_residuals(T, pd)
    scale = max(1.0, fro(T))
    assert res["T-VH"] <= 1e-9 * scale
    assert res["H-sqrt(T*T)"] < 1e-8 * scale
    assert res["V*V-P"] < 1e-9 and res["V(I-P)"] < 1e-9
    if r == n:
        assert fro(pd.V.conj().T @ pd.V - np.eye(n)) < 1e-9


def test_spectral_resolution_examples():
    res = op.spectral_resolution(np.diag([1.0, 1.0, 2.0]))
    assert np.allclose(res.eigenvalues, [1, 2])
    assert np.allclose(res.projections[0], np.diag([1, 1, 0]))
    assert np.allclose(res.projections[1], np.diag([0, 0, 1]))
    res = op.spectral_resolution(np.zeros((3, 3)))
    assert len(res.projections) == 1 and np.allclose(res.projections[0], np.eye(3))
    with pytest.raises(ValueError):
        op.spectral_resolution(NIL)


@given(seeds, st.integers(2, 7))
def test_spectral_resolution_planted_double(seed, n):
    rng = np.random.default_rng(seed)
    U = random_unitary(rng, n)
    w = np.arange(1, n + 1, dtype=float)
    w[1] = w[0]
    H = (U * w) @ U.conj().T
    res = op.spectral_resolution(H)
    assert len(res.eigenvalues) == n - 1
    P = res.projections
    assert fro(sum(P) - np.eye(n)) < 1e-9
    for j, p in enumerate(P):
        for l, q in enumerate(P):
            assert fro(p @ q - (p if j == l else 0)) < 1e-9
    assert fro(res.reconstruct() - H) <= 1e-9 * fro(H)


def test_commute_check_examples():
    rng = np.random.default_rng(1)
    A = crandn(rng, 3, 3)
    assert op.commute_check(A, A @ A)
    c = op.commute_check(NIL, NIL.T)
    assert not c.commutes and c.residual == pytest.approx(np.sqrt(2))
    U = random_unitary(rng, 4)
    D1, D2 = np.diag(crandn(rng, 4)), np.diag(crandn(rng, 4))
    assert op.commute_check(U @ D1 @ U.conj().T, U @ D2 @ U.conj().T)


def test_spectral_commute_examples():
    H = np.diag([1.0, 2.0])
    rep = op.spectral_commute(H, H)
    assert rep.all_pairwise and rep.product_equal
    rep = op.spectral_commute(H, np.array([[0, 1], [1, 0]]))
    assert not rep.product_equal and not rep.all_pairwise and rep.equivalence_holds
    rng = np.random.default_rng(2)
    X = random_hermitian(rng, 4)
    rep = op.spectral_commute(X, 2 * X @ X - X + np.eye(4))
    assert rep.all_pairwise and rep.product_equal


@given(seeds, st.booleans())
def test_spectral_commute_equivalence(seed, commuting):
    H, K = hermitian_pair(np.random.default_rng(seed), commuting)
    rep = op.spectral_commute(H, K, tol=1e-8)
    assert rep.equivalence_holds and rep.product_equal == commuting


def test_proper_stability_examples():
    rep = op.proper_stability(np.diag([1.0, 2.0]), np.diag([1.0, 0.0]))
    assert rep.stable_under_C and rep.stable_under_C_adjoint and rep.commutes
    rep = op.proper_stability(NIL, np.diag([1.0, 0.0]))
    assert rep.stable_under_C and not rep.stable_under_C_adjoint and not rep.commutes
    with pytest.raises(ValueError):
        op.proper_stability(NIL, NIL)


@given(seeds, st.sampled_from(PATTERNS))
def test_stability_biconditional(seed, pattern):
    C, E = stability_pair(np.random.default_rng(seed), pattern)
    rep = op.proper_stability(C, E)
    assert rep.commutes == (rep.stable_under_C and rep.stable_under_C_adjoint)
    assert (rep.stable_under_C, rep.stable_under_C_adjoint) == {
        "commuting": (True, True),
        "C-stable-only": (True, False),
        "C*-stable-only": (False, True),
        "generic": (False, False),
    }[pattern]
    # the commutator splits into the two corner residuals
    assert rep.residual_commutator**2 == pytest.approx(
        rep.residual_C**2 + rep.residual_C_adjoint**2, rel=1e-9, abs=1e-24
    )


def test_adjoint_transfer_examples():
    rng = np.random.default_rng(3)
    C = crandn(rng, 3, 3)
    rep = op.adjoint_commute_transfer(np.eye(3), C)
    assert rep.commutes_with_C and rep.commutes_with_C_adjoint
    rep = op.adjoint_commute_transfer(np.diag([1.0, -1.0]), np.diag([1j, 2.0]))
    assert rep.commutes_with_C and rep.commutes_with_C_adjoint and rep.transfer_holds
    with pytest.raises(ValueError):
        op.adjoint_commute_transfer(NIL, C[:2, :2])


@given(seeds)
def test_adjoint_transfer_random(seed):
    B, C = commuting_hermitian_general(np.random.default_rng(seed))
    rep = op.adjoint_commute_transfer(B, C)
    assert rep.commutes_with_C and rep.transfer_holds
    assert fro(B @ C.conj().T - C.conj().T @ B) < 1e-8


def test_tolerance_env_override(monkeypatch):
    A = np.diag([1.0, 2.0])
    B = A + 1e-6 * np.array([[0, 1], [0, 0]])
    assert not op.commute_check(A, B)
    monkeypatch.setenv("OPFACTOR_TOL", "1e-4")
    assert op.commute_check(A, B)
    monkeypatch.setenv("OPFACTOR_TOL", "-1")
    with pytest.raises(ValueError):
        op.commute_check(A, B)
