"""Dense complex linear-algebra kernels.

Every routine here is deterministic for a fixed input: no LAPACK calls, no
randomised starts. Matrices are plain ``numpy`` arrays of dtype
``complex128``; :func:`as_matrix` is the validating constructor used at every
public entry point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import EPS

MAX_SWEEPS = 64
SWEEP_TOL = 1e-14
# rotations on subnormal entries overflow in the phase computation
TINY = 1e-280


def as_matrix(M: Any, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a finite, nonempty, 2-D ``complex128`` array."""
    A = np.array(M, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise ValueError(f"{name} must be nonempty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def as_square(M: Any, name: str = "matrix") -> np.ndarray:
    A = as_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def fro(M: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(M) ** 2)))


def dagger(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def check_hermitian(H: Any, name: str = "H", tol: float = 1e-10) -> np.ndarray:
    """Validate Hermitian input and return the symmetrised ``(H + H^*)/2``."""
    A = as_square(H, name)
    scale = fro(A)
    if fro(A - dagger(A)) > tol * scale:
        raise ValueError(f"{name} is not Hermitian within {tol:g}")
    return (A + dagger(A)) / 2


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SvdDecomposition:
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray


def householder_qr(M: Any) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR factorisation by Householder reflections.

    Returns ``Q`` (m x k, orthonormal columns) and ``R`` (k x n, upper
    triangular with non-negative real diagonal), ``k = min(m, n)``.
    """
    A = as_matrix(M)
    m, n = A.shape
    k = min(m, n)
    R = A.copy()
    Q = np.eye(m, dtype=np.complex128)
    for j in range(k):
        x = R[j:, j]
        norm_x = np.sqrt(np.sum(np.abs(x) ** 2))
        if norm_x == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * norm_x
        v = x.copy()
        v[0] -= alpha
        vv = np.real(np.vdot(v, v))
        if vv == 0.0:
            continue
        # R <- (I - 2 v v^*/v^*v) R,  Q <- Q (I - 2 v v^*/v^*v)
        R[j:, j:] -= np.outer(v, (2.0 / vv) * (v.conj() @ R[j:, j:]))
        Q[:, j:] -= np.outer((2.0 / vv) * (Q[:, j:] @ v), v.conj())
        R[j + 1 :, j] = 0.0
    Q = Q[:, :k]
    R = np.triu(R[:k, :])
    d = np.diag(R)
    mag = np.abs(d)
    phases = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    R = phases.conj()[:, None] * R
    Q = Q * phases[None, :]
    R[np.diag_indices(k)] = np.abs(np.diag(R))
    return Q, R


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> tuple[float, float, complex]:
    """``(c, s, e)`` such that ``G = [[c, s], [-s conj(e), c conj(e)]]`` is unitary and
    ``G^* [[app, apq], [conj(apq), aqq]] G`` is diagonal."""
    r = abs(apq)
    e = apq / r
    tau = (aqq - app) / (2.0 * r)
    if abs(tau) > 1e150:
        t = 0.5 / tau
    else:
        t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, t * c, e


def _rotate_columns(X: np.ndarray, p: int, q: int, c: float, s: float, e: complex) -> None:
    xp = X[:, p].copy()
    xq = X[:, q]
    ec = e.conjugate()
    X[:, p] = c * xp - (s * ec) * xq
    X[:, q] = s * xp + (c * ec) * xq


def hermitian_eig(H: Any) -> EigenDecomposition:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Sweeps stop once the off-diagonal Frobenius norm falls below
    ``1e-14 * ||H||_F`` (at most 64 sweeps). Eigenvalues are returned in
    ascending order.
    """
    A = check_hermitian(H).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = fro(A)
    if scale > 0 and n > 1:
        target = SWEEP_TOL * scale
        for _ in range(MAX_SWEEPS):
            off = fro(A - np.diag(np.diag(A)))
            if off < target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if abs(apq) < TINY:
                        continue
                    c, s, e = _jacobi_rotation(A[p, p].real, A[q, q].real, complex(apq))
                    _rotate_columns(A, p, q, c, s, e)
                    # rows: A <- G^* A, via column views of the transpose
                    At = A.T
                    rp = At[:, p].copy()
                    rq = At[:, q]
                    At[:, p] = c * rp - (s * e) * rq
                    At[:, q] = s * rp + (c * e) * rq
                    A[p, q] = A[q, p] = 0.0
                    A[p, p] = A[p, p].real
                    A[q, q] = A[q, q].real
                    _rotate_columns(V, p, q, c, s, e)
    w = np.real(np.diag(A)).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(eigenvalues=w[order], vectors=V[:, order])


def _one_sided_jacobi(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonalise the columns of tall ``A`` (m >= n) by Hestenes rotations.

    Each rotation is the cyclic-Jacobi rotation of the Gram matrix ``A^* A``
    restricted to a column pair, applied to ``A`` itself so the Gram matrix is
    never formed. Returns ``(W, V)`` with ``A V = W`` and ``W`` having
    mutually orthogonal columns.
    """
    m, n = A.shape
    # rows 0..n-1 of X hold the columns of [A; I], so each rotation is one
    # contiguous two-row update covering both W and V
    X = np.vstack([A, np.eye(n, dtype=np.complex128)]).T.copy()
    tol = EPS * max(1.0, math.sqrt(m))
    for _ in range(MAX_SWEEPS):
        rotated = False
        norms = [float(np.vdot(X[j, :m], X[j, :m]).real) for j in range(n)]
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha, beta = norms[p], norms[q]
                if alpha < TINY or beta < TINY:
                    continue
                xp, xq = X[p], X[q]
                gamma = complex(np.vdot(xp[:m], xq[:m]))
                if abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                c, s, e = _jacobi_rotation(alpha, beta, gamma)
                ec = e.conjugate()
                old = xp.copy()
                X[p] = c * old - (s * ec) * xq
                X[q] = s * old + (c * ec) * xq
                norms[p] = float(np.vdot(xp[:m], xp[:m]).real)
                norms[q] = float(np.vdot(xq[:m], xq[:m]).real)
        if not rotated:
            break
    return X[:, :m].T.copy(), X[:, m:].T.copy()


def singular_values(M: Any) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] < A.shape[1]:
        A = dagger(A)
    W, _ = _one_sided_jacobi(A)
    return np.sort(np.sqrt(np.sum(np.abs(W) ** 2, axis=0)))[::-1]


def _first_entry_phase(u: np.ndarray) -> complex:
    mag = np.abs(u)
    big = mag.max()
    if big == 0:
        return 1.0
    j = int(np.argmax(mag > 1e-12 * big))
    return u[j] / mag[j]


def _complete_unitary(Ur: np.ndarray, m: int) -> np.ndarray:
    r = Ur.shape[1]
    if r == m:
        return Ur
    Q, _ = householder_qr(np.hstack([Ur, np.eye(m, dtype=np.complex128)]))
    return np.hstack([Ur, Q[:, r:m]])


def _svd_tall(A: np.ndarray, full_u: bool = True) -> SvdDecomposition:
    m, n = A.shape
    W, V = _one_sided_jacobi(A)
    sigma = np.sqrt(np.sum(np.abs(W) ** 2, axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma, W, V = sigma[order], W[:, order], V[:, order]
    floor = m * EPS * sigma[0] if n else 0.0
    r = int(np.sum(sigma > floor)) if sigma[0] > 0 else 0
    Ur = W[:, :r] / sigma[:r]
    U = _complete_unitary(Ur, m) if full_u else Ur.copy()
    for j in range(U.shape[1]):
        ph = _first_entry_phase(U[:, j])
        U[:, j] = U[:, j] * np.conj(ph)
        if j < n:
            V[:, j] = V[:, j] * np.conj(ph)
    return SvdDecomposition(U=U, singular_values=sigma, V=V)


def svd(M: Any, full_u: bool = True) -> SvdDecomposition:
    """Full SVD ``M = U diag(sigma) V^*`` with square unitary ``U`` and ``V``.

    Singular values are descending. Each column of ``U`` is phase-normalised so
    its first non-negligible entry is real positive, which makes the result
    deterministic.

    ``full_u=False`` skips completing ``U`` for tall input: ``U`` then holds
    only the columns with ``sigma_j > m * eps * sigma_1``. ``V`` is always
    square.
    """
    A = as_matrix(M)
    m, n = A.shape
    if m >= n:
        return _svd_tall(A, full_u)
    t = _svd_tall(dagger(A))
    U, V = t.V.copy(), t.U.copy()
    for j in range(m):
        ph = _first_entry_phase(U[:, j])
        U[:, j] = U[:, j] * np.conj(ph)
        V[:, j] = V[:, j] * np.conj(ph)
    return SvdDecomposition(U=U, singular_values=t.singular_values, V=V)


def rank_threshold(shape: tuple[int, int], sigma_max: float) -> float:
    return max(shape) * EPS * sigma_max


def numeric_rank(M: Any, tol: float | None = None) -> int:
    """Number of singular values above ``tol``.

    Default threshold is ``max(m, n) * eps * sigma_1``.
    """
    A = as_matrix(M)
    s = singular_values(A)
    tau = rank_threshold(A.shape, s[0]) if tol is None else tol
    return int(np.sum(s > tau))


def unitary_exponential(H: Any, t: float) -> np.ndarray:
    """``exp(i t H)`` for Hermitian ``H`` through its eigen-decomposition."""
    ed = hermitian_eig(H)
    V = ed.vectors
    return (V * np.exp(1j * t * ed.eigenvalues)[None, :]) @ dagger(V)


def _check_pow2(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")


def fft(v: Any) -> np.ndarray:
    """Unnormalised radix-2 decimation-in-time DFT."""
    a = np.array(v, dtype=np.complex128).ravel()
    n = a.size
    _check_pow2(n)
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    a = a[rev]
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = a.reshape(n // size, size)
        even = blocks[:, :half]
        odd = blocks[:, half:] * tw
        a = np.hstack([even + odd, even - odd]).ravel()
        size *= 2
    return a


def ifft(v: Any) -> np.ndarray:
    a = np.array(v, dtype=np.complex128).ravel()
    return np.conj(fft(np.conj(a))) / a.size


def matrix_to_json(M: Any) -> dict:
    A = as_matrix(M)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"matrix JSON needs rows, cols and data: {exc}") from None
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    if len(data) != rows * cols:
        raise ValueError(f"data has {len(data)} entries, expected {rows * cols}")
    vals = []
    for pair in data:
        if isinstance(pair, (int, float)):
            vals.append(complex(pair))
        elif len(pair) == 2:
            vals.append(complex(float(pair[0]), float(pair[1])))
        else:
            raise ValueError(f"bad entry {pair!r}; expected [re, im]")
    return as_matrix(np.array(vals).reshape(rows, cols))
