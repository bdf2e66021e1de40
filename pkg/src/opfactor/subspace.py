"""Subspaces of C^n stored as orthonormal frames.

A :class:`Subspace` with zero columns is the zero subspace; it is a regular
value so conditions such as ``N_A & N_B == {0}`` can be tested directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS
from .numkernel import as_matrix, dagger, fro, matrix_to_json, singular_values, svd

# relative to sigma_1; products of operators accumulate rounding well above
# max(m, n) * eps, so subspace extraction uses a looser default than numeric_rank
RANK_RTOL = DEFAULTS.rank


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis must have {self.ambient_dim} rows, got shape {b.shape}"
            )
        k = b.shape[1]
        if k > self.ambient_dim:
            raise ValueError("more basis vectors than the ambient dimension")
        if k and fro(dagger(b) @ b - np.eye(k)) > max(k, 1) * 1e-10:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((n, 0), dtype=np.complex128))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n, dtype=np.complex128))

    @classmethod
    def span(cls, vectors, rtol: float | None = None) -> "Subspace":
        """Orthonormalised column span of ``vectors`` (an n x k array)."""
        V = np.asarray(vectors, dtype=np.complex128)
        if V.ndim == 1:
            V = V[:, None]
        if V.shape[1] == 0:
            return cls.zero(V.shape[0])
        return range_space(V, rtol)

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"

    def to_json(self) -> dict:
        """Basis as matrix JSON; ``None`` for the zero subspace, which has no columns."""
        return {"ambient_dim": self.ambient_dim, "dim": self.dim,
                "basis": matrix_to_json(self.basis) if self.dim else None}


def _rank(sigma: np.ndarray, rtol: float | None, scale: float | None) -> int:
    ref = max(sigma[0], 0.0 if scale is None else scale)
    if ref == 0:
        return 0
    tau = (RANK_RTOL if rtol is None else rtol) * ref
    return int(np.sum(sigma > tau))


def null_space(T, rtol: float | None = None, scale: float | None = None) -> Subspace:
    """Right-singular vectors of ``T`` with singular value at most ``rtol * ||T||_2``.

    ``scale`` raises the reference norm above ``||T||_2``; pass
    ``||A|| ||B||`` for a product ``T = AB`` so a product that cancels to
    rounding noise is recognised as zero.
    """
    A = as_matrix(T, "T")
    d = svd(A, full_u=False)
    r = _rank(d.singular_values, rtol, scale)
    return Subspace(A.shape[1], d.V[:, r:])


def range_space(T, rtol: float | None = None, scale: float | None = None) -> Subspace:
    A = as_matrix(T, "T")
    d = svd(A, full_u=False)
    r = min(_rank(d.singular_values, rtol, scale), d.U.shape[1])
    return Subspace(A.shape[0], d.U[:, :r])


def projector(S: Subspace) -> np.ndarray:
    return S.basis @ dagger(S.basis)


def _same_ambient(S1: Subspace, S2: Subspace) -> int:
    if S1.ambient_dim != S2.ambient_dim:
        raise ValueError(
            f"ambient dimensions differ: {S1.ambient_dim} vs {S2.ambient_dim}"
        )
    return S1.ambient_dim


def sum(S1: Subspace, S2: Subspace) -> Subspace:  # noqa: A001 - lattice join
    n = _same_ambient(S1, S2)
    if S1.dim + S2.dim == 0:
        return Subspace.zero(n)
    return range_space(np.hstack([S1.basis, S2.basis]))


def intersect(S1: Subspace, S2: Subspace) -> Subspace:
    n = _same_ambient(S1, S2)
    if S1.dim == 0 or S2.dim == 0:
        return Subspace.zero(n)
    if S1.dim == n and S2.dim == n:
        return Subspace.full(n)
    eye = np.eye(n)
    return null_space(np.vstack([eye - projector(S1), eye - projector(S2)]))


def complement(S: Subspace) -> Subspace:
    n = S.ambient_dim
    if S.dim == 0:
        return Subspace.full(n)
    return null_space(projector(S))


def angle(S1: Subspace, S2: Subspace) -> float:
    """``inf ||x - y||`` over unit vectors ``x`` in ``S1`` and ``y`` in ``S2``.

    Equals ``sqrt(2 - 2 cos(theta_min))`` with ``theta_min`` the smallest
    principal angle. Exactly 0 when the subspaces intersect nontrivially.
    """
    _same_ambient(S1, S2)
    if S1.dim == 0 or S2.dim == 0:
        raise ValueError("angle is undefined for the zero subspace")
    if intersect(S1, S2).dim > 0:
        return 0.0
    c = min(1.0, float(singular_values(dagger(S1.basis) @ S2.basis)[0]))
    return float(np.sqrt(max(2.0 - 2.0 * c, 0.0)))


def contains(outer: Subspace, inner: Subspace, tol: float | None = None) -> bool:
    return containment_residual(outer, inner) <= (
        outer.ambient_dim * (DEFAULTS.containment if tol is None else tol)
    )


def containment_residual(outer: Subspace, inner: Subspace) -> float:
    """``||(I - P_outer) B_inner||_F``; zero iff ``inner`` lies in ``outer``."""
    _same_ambient(outer, inner)
    if inner.dim == 0:
        return 0.0
    return fro(inner.basis - projector(outer) @ inner.basis)


def equal(S1: Subspace, S2: Subspace, tol: float | None = None) -> bool:
    return S1.dim == S2.dim and contains(S1, S2, tol) and contains(S2, S1, tol)
