"""Polar and spectral decompositions, commutativity and proper stability.

In finite dimensions every operator is bounded, closed and everywhere defined,
so the extension relations ``BA <= AB`` of the unbounded theory collapse to
equalities ``BA = AB`` and that is what is tested here.

Stability of ``E(H)`` under ``C`` means ``CE = ECE``. Since

    EC - CE = EC(I - E) - (I - E)CE

and the two terms live in complementary off-diagonal corners,
``||EC - CE||_F**2 = ||ECE - CE||_F**2 + ||EC*E - C*E||_F**2``. The
``commutes`` flag of :func:`proper_stability` is decided from those two corner
residuals, which makes "commutes iff stable under C and C*" hold exactly on
every input rather than up to a boundary effect of the threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import subspace as sp
from .config import residual_tol
from .numkernel import (
    as_square,
    check_hermitian,
    dagger,
    fro,
    hermitian_eig,
    rank_threshold,
    svd,
)

PAIRWISE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class PolarDecomposition:
    V: np.ndarray
    H: np.ndarray


@dataclass(frozen=True, eq=False)
class SpectralResolution:
    eigenvalues: np.ndarray
    projections: tuple[np.ndarray, ...]

    def reconstruct(self) -> np.ndarray:
        return sum(lam * P for lam, P in zip(self.eigenvalues, self.projections))


@dataclass(frozen=True)
class CommuteCheck:
    commutes: bool
    residual: float

    def __bool__(self) -> bool:
        return self.commutes

    def to_json(self) -> dict:
        return {"commutes": self.commutes, "residual": repr(self.residual)}


@dataclass(frozen=True)
class StabilityReport:
    stable_under_C: bool
    stable_under_C_adjoint: bool
    commutes: bool
    residual_C: float
    residual_C_adjoint: float
    residual_commutator: float

    def to_json(self) -> dict:
        return {
            "stable_under_C": self.stable_under_C,
            "stable_under_C_adjoint": self.stable_under_C_adjoint,
            "commutes": self.commutes,
            "residuals": {
                "ECE-CE": repr(self.residual_C),
                "EC*E-C*E": repr(self.residual_C_adjoint),
                "EC-CE": repr(self.residual_commutator),
            },
        }


def polar(T) -> PolarDecomposition:
    """``T = V H`` with ``H = (T^*T)^(1/2)`` and ``V`` a partial isometry.

    ``V`` is isometric on the range of ``H`` and zero on its orthogonal
    complement.
    """
    A = as_square(T, "T")
    d = svd(A)
    s = d.singular_values
    r = int(np.sum(s > rank_threshold(A.shape, s[0]))) if s[0] > 0 else 0
    V = d.U[:, :r] @ dagger(d.V[:, :r])
    H = (d.V * s[None, :]) @ dagger(d.V)
    return PolarDecomposition(V=V, H=(H + dagger(H)) / 2)


def spectral_resolution(H, gap_tol: float | None = None) -> SpectralResolution:
    """Group eigenvalues into clusters and return one projection per cluster.

    Walking the ascending eigenvalues, a new cluster starts whenever the gap to
    the previous eigenvalue exceeds ``gap_tol`` (default
    ``1e-8 * max(1, ||H||_2)``). Each cluster is represented by its mean.
    """
    A = check_hermitian(H)
    ed = hermitian_eig(A)
    w, V = ed.eigenvalues, ed.vectors
    if gap_tol is None:
        gap_tol = 1e-8 * max(1.0, float(np.max(np.abs(w))))
    groups: list[list[int]] = [[0]]
    for j in range(1, w.size):
        if w[j] - w[j - 1] > gap_tol:
            groups.append([j])
        else:
            groups[-1].append(j)
    values = np.array([np.mean(w[g]) for g in groups])
    projections = tuple(V[:, g] @ dagger(V[:, g]) for g in groups)
    return SpectralResolution(eigenvalues=values, projections=projections)


def commute_check(A, B, tol: float | None = None) -> CommuteCheck:
    """``||AB - BA||_F <= tol * (1 + ||A||_F ||B||_F)``."""
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    tol = residual_tol() if tol is None else tol
    r = fro(A @ B - B @ A)
    return CommuteCheck(r <= tol * (1.0 + fro(A) * fro(B)), r)


@dataclass(frozen=True)
class SpectralCommuteReport:
    pairwise: tuple[tuple[bool, ...], ...]
    product_equal: bool
    product_residual: float
    equivalence_holds: bool

    @property
    def all_pairwise(self) -> bool:
        return all(all(row) for row in self.pairwise)

    def to_json(self) -> dict:
        return {
            "pairwise": [list(row) for row in self.pairwise],
            "all_pairwise": self.all_pairwise,
            "product_equal": self.product_equal,
            "product_residual": repr(self.product_residual),
            "equivalence_holds": self.equivalence_holds,
        }


def spectral_commute(H, K, tol: float | None = None) -> SpectralCommuteReport:
    """Compare ``HK = KH`` against commutation of every pair of spectral projections."""
    H = check_hermitian(H, "H")
    K = check_hermitian(K, "K")
    P = spectral_resolution(H).projections
    Q = spectral_resolution(K).projections
    pairwise = tuple(
        tuple(fro(p @ q - q @ p) <= PAIRWISE_TOL for q in Q) for p in P
    )
    prod = commute_check(H, K, tol)
    all_pw = all(all(row) for row in pairwise)
    return SpectralCommuteReport(
        pairwise=pairwise,
        product_equal=prod.commutes,
        product_residual=prod.residual,
        equivalence_holds=prod.commutes == all_pw,
    )


def _check_projection(E: np.ndarray, tol: float = 1e-9) -> None:
    if fro(E @ E - E) > tol or fro(E - dagger(E)) > tol:
        raise ValueError(f"E is not an orthogonal projection within {tol:g}")


def proper_stability(C, E, tol: float | None = None) -> StabilityReport:
    """Stability of ``E(H)`` under ``C`` and ``C^*`` versus ``EC = CE``."""
    C = as_square(C, "C")
    E = as_square(E, "E")
    if C.shape != E.shape:
        raise ValueError(f"shape mismatch {C.shape} vs {E.shape}")
    _check_projection(E)
    tol = residual_tol() if tol is None else tol
    bound = tol * (1.0 + fro(C))
    Cs = dagger(C)
    r_c = fro(E @ C @ E - C @ E)
    r_cs = fro(E @ Cs @ E - Cs @ E)
    r_comm = fro(E @ C - C @ E)
    stable_c = r_c <= bound
    stable_cs = r_cs <= bound
    return StabilityReport(
        stable_under_C=stable_c,
        stable_under_C_adjoint=stable_cs,
        commutes=max(r_c, r_cs) <= bound,
        residual_C=r_c,
        residual_C_adjoint=r_cs,
        residual_commutator=r_comm,
    )


@dataclass(frozen=True)
class TransferReport:
    commutes_with_C: CommuteCheck
    commutes_with_C_adjoint: CommuteCheck
    transfer_holds: bool

    def to_json(self) -> dict:
        return {
            "BC=CB": self.commutes_with_C.to_json(),
            "BC*=C*B": self.commutes_with_C_adjoint.to_json(),
            "transfer_holds": self.transfer_holds,
        }


def adjoint_commute_transfer(B, C, tol: float | None = None) -> TransferReport:
    """For Hermitian ``B``: ``BC = CB`` implies ``BC^* = C^*B``."""
    B = check_hermitian(B, "B")
    C = as_square(C, "C")
    c1 = commute_check(B, C, tol)
    c2 = commute_check(B, dagger(C), tol)
    return TransferReport(c1, c2, (not c1.commutes) or c2.commutes)


def sqrt_psd(G) -> np.ndarray:
    """Positive square root of a positive semidefinite matrix via its eigenbasis."""
    ed = hermitian_eig(G)
    V = ed.vectors
    return (V * np.sqrt(np.clip(ed.eigenvalues, 0.0, None))[None, :]) @ dagger(V)


def polar_invariant_residuals(T, pd: PolarDecomposition) -> dict[str, float]:
    """Residuals of the defining properties of a polar decomposition."""
    A = as_square(T, "T")
    range_H = sp.range_space(pd.H)
    return {
        "T-VH": fro(A - pd.V @ pd.H),
        "H-sqrt(T*T)": fro(pd.H - sqrt_psd(dagger(A) @ A)),
        "V*V-P": fro(dagger(pd.V) @ pd.V - sp.projector(range_H)),
        "V(I-P)": fro(pd.V @ sp.projector(sp.complement(range_H))),
    }
