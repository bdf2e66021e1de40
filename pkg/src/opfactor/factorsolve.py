"""Solving by factorisation: constant-coefficient ODEs and null spaces of products.

An ODE ``sum_k c_k u^(k) = 0`` factors as ``prod_j (d/dx - r_j)^(m_j) u = 0``
over the roots ``r_j`` of its characteristic polynomial. Each factor
contributes ``x^k e^{r_j x}`` for ``k < m_j``; the powers of ``x`` are what
rescue the method when two factors coincide.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from . import subspace as sp
from .config import EPS, residual_tol
from .errors import HypothesisError
from .numkernel import as_square, fro, householder_qr, matrix_to_json, singular_values
from .operators import commute_check

CLUSTER_RTOL = 1e-6
# clusters farther apart than this (relative) are never considered one root
RECOVERY_RTOL = 1e-2
ABERTH_TOL = 1e-12
ABERTH_MAX_ITER = 2000


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in ascending degree: ``c[0] + c[1] z + ... + c[n] z^n``."""

    coefficients: tuple[complex, ...]

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coefficients)
        if not c:
            raise ValueError("polynomial needs at least one coefficient")
        if not all(np.isfinite(x) for x in c):
            raise ValueError("coefficients must be finite")
        if c[-1] == 0:
            raise ValueError("leading coefficient is zero")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_real(self) -> bool:
        return all(x.imag == 0 for x in self.coefficients)

    def derivative_coefficients(self, k: int) -> np.ndarray:
        return _derivative(np.array(self.coefficients), k)

    def __call__(self, z, k: int = 0):
        return _horner(self.derivative_coefficients(k), z)


def _derivative(c: np.ndarray, k: int) -> np.ndarray:
    for _ in range(k):
        if c.size <= 1:
            return np.zeros(1, dtype=np.complex128)
        c = c[1:] * np.arange(1, c.size)
    return c.astype(np.complex128)


def _horner(c: np.ndarray, z):
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z) + c[-1]
    for a in c[-2::-1]:
        acc = acc * z + a
    return acc


def _abs_bound(c: np.ndarray, z):
    """``sum |c_i| |z|^i``: scale of the rounding error when evaluating at ``z``."""
    return np.real(_horner(np.abs(c).astype(np.complex128), np.abs(z)))


@dataclass(frozen=True)
class RootCluster:
    root: complex
    multiplicity: int

    def to_json(self) -> dict:
        return {"re": self.root.real, "im": self.root.imag, "mult": self.multiplicity}


def _aberth(a: np.ndarray) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration for all roots of ``a`` (ascending)."""
    d = a.size - 1
    monic = a / a[-1]
    radius = 1.0 + float(np.max(np.abs(monic[:-1])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(d) / d + 0.4))
    dp = _derivative(monic, 1)
    for _ in range(ABERTH_MAX_ITER):
        p = _horner(monic, z)
        p1 = _horner(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(p1 != 0, p / p1, 0.0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        small_step = np.abs(w) <= ABERTH_TOL * (1.0 + np.abs(z))
        small_res = np.abs(_horner(monic, z)) <= 4 * d * EPS * _abs_bound(monic, z)
        if np.all(small_step | small_res):
            break
    return z


def _refine(c: np.ndarray, z: complex, m: int) -> complex:
    """Newton on the ``(m-1)``-th derivative, whose root near a genuine ``m``-fold
    root is simple."""
    f, g = _derivative(c, m - 1), _derivative(c, m)
    for _ in range(100):
        gz = _horner(g, z)
        if gz == 0:
            break
        step = complex(_horner(f, z) / gz)
        z = z - step
        if abs(step) <= 4 * EPS * (1.0 + abs(z)):
            break
    return complex(z)


def _polish(c: np.ndarray, z: complex) -> complex:
    """A few Newton steps on a simple root, kept only if they stay close and help."""
    w = _refine(c, z, 1)
    if abs(w - z) <= 1e-8 * (1.0 + abs(z)) and abs(_horner(c, w)) <= abs(_horner(c, z)):
        return w
    return complex(z)


def _snap(r: complex) -> complex:
    tiny = 1e-14 * (1.0 + abs(r))
    return complex(0.0 if abs(r.real) <= tiny else r.real, 0.0 if abs(r.imag) <= tiny else r.imag)


def _is_multiple_root(c: np.ndarray, z: complex, m: int) -> bool:
    d = c.size - 1
    for k in range(m):
        ck = _derivative(c, k)
        if abs(_horner(ck, z)) > 64 * d * EPS * _abs_bound(ck, z):
            return False
    return True


def _cluster(z: np.ndarray, c: np.ndarray, rtol: float) -> list[tuple[complex, int]]:
    order = sorted(range(z.size), key=lambda k: (z[k].real, z[k].imag))
    clusters: list[list[complex]] = []
    for k in order:
        for cl in clusters:
            if any(abs(z[k] - w) <= rtol * (1.0 + max(abs(z[k]), abs(w))) for w in cl):
                cl.append(z[k])
                break
        else:
            clusters.append([z[k]])
    out = [(complex(np.mean(cl)), len(cl)) for cl in clusters]
    out = [(_refine(c, r, m) if m > 1 else _polish(c, r), m) for r, m in out]

    # An m-fold root only resolves to about eps^(1/m); pull together nearby
    # clusters whose merged centroid passes the derivative test.
    rejected: set[tuple[complex, complex]] = set()
    while True:
        best = None
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                (ri, mi), (rj, mj) = out[i], out[j]
                key = (ri, rj)
                dist = abs(ri - rj) / (1.0 + max(abs(ri), abs(rj)))
                if dist < RECOVERY_RTOL and key not in rejected:
                    if best is None or dist < best[0]:
                        best = (dist, i, j)
        if best is None:
            break
        _, i, j = best
        (ri, mi), (rj, mj) = out[i], out[j]
        m = mi + mj
        cand = _refine(c, (mi * ri + mj * rj) / m, m)
        near = abs(cand - ri) + abs(cand - rj) <= 2 * RECOVERY_RTOL * (1.0 + abs(cand))
        if near and _is_multiple_root(c, cand, m):
            out = [x for k, x in enumerate(out) if k not in (i, j)] + [(cand, m)]
        else:
            rejected.add((ri, rj))
    return out


def roots(p: Polynomial, cluster_rtol: float = CLUSTER_RTOL) -> list[RootCluster]:
    """Roots of ``p`` with multiplicities.

    Exact zero roots are split off first. The rest come from Aberth-Ehrlich
    iteration; approximations within ``cluster_rtol * (1 + |r|)`` of each
    other are merged and replaced by their Newton-polished centroid. For real
    coefficients, real or imaginary parts below ``1e-14 (1 + |r|)`` are set
    to zero.
    """
    if p.degree < 1:
        raise ValueError("degree must be at least 1")
    c = np.array(p.coefficients)
    n_zero = int(np.argmax(c != 0))
    found: list[tuple[complex, int]] = [(0j, n_zero)] if n_zero else []
    reduced = c[n_zero:]
    if reduced.size > 1:
        approx = _aberth(reduced)
        found += _cluster(approx, reduced, cluster_rtol)
    if p.is_real:
        found = [(_snap(r), m) for r, m in found]
    found.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return [RootCluster(r, m) for r, m in found]


@dataclass(frozen=True)
class OdeSolutionBasis:
    """Terms ``(r, k)`` standing for the functions ``x^k e^{r x}``."""

    terms: tuple[tuple[complex, int], ...]

    def __len__(self) -> int:
        return len(self.terms)

    def evaluate(self, x) -> np.ndarray:
        """Matrix of term values, one row per sample point."""
        x = np.asarray(x, dtype=float).ravel()
        return np.stack([x**k * np.exp(r * x) for r, k in self.terms], axis=1)

    def to_json(self) -> list[dict]:
        return [{"re": r.real, "im": r.imag, "power": k} for r, k in self.terms]


def solve_ode(p: Polynomial, cluster_rtol: float = CLUSTER_RTOL) -> OdeSolutionBasis:
    """Basis of solutions of ``p(d/dx) u = 0``."""
    terms = []
    for rc in roots(p, cluster_rtol):
        terms += [(rc.root, k) for k in range(rc.multiplicity)]
    return OdeSolutionBasis(tuple(terms))


def naive_exponential_basis(p: Polynomial) -> OdeSolutionBasis:
    """One exponential per factor, ignoring multiplicity; rank-deficient for repeated roots."""
    terms = []
    for rc in roots(p):
        terms += [(rc.root, 0)] * rc.multiplicity
    return OdeSolutionBasis(tuple(terms))


def ode_residual(basis: OdeSolutionBasis, p: Polynomial, sample_points) -> float:
    """Max of ``|p(d/dx)(x^k e^{rx})|`` over terms and sample points.

    Uses ``p(D)[x^k e^{rx}] = e^{rx} sum_i C(k, i) x^(k-i) p^(i)(r)``, so no
    numerical differentiation is involved.
    """
    x = np.asarray(sample_points, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("sample points must be finite")
    worst = 0.0
    for r, k in basis.terms:
        acc = np.zeros(x.shape, dtype=np.complex128)
        for i in range(k + 1):
            acc += comb(k, i) * x ** (k - i) * complex(p(r, i))
        val = np.abs(np.exp(r * x) * acc)
        worst = max(worst, float(np.max(val)) if val.size else 0.0)
    return worst


def wronskian(basis: OdeSolutionBasis, x: float = 0.0) -> np.ndarray:
    """Generalised Wronskian: entry ``(i, j)`` is the ``i``-th derivative of term ``j`` at ``x``."""
    n = len(basis)
    W = np.zeros((n, n), dtype=np.complex128)
    for j, (r, k) in enumerate(basis.terms):
        for i in range(n):
            s = 0j
            for l in range(min(i, k) + 1):
                s += comb(i, l) * factorial(k) / factorial(k - l) * x ** (k - l) * r ** (i - l)
            W[i, j] = np.exp(r * x) * s
    return W


def abs_det(M) -> float:
    """``|det M|`` from the diagonal of a Householder ``R`` factor."""
    _, R = householder_qr(as_square(M))
    return float(np.prod(np.abs(np.diag(R))))


def _least_squares(M: np.ndarray, x: np.ndarray) -> np.ndarray:
    Q, R = householder_qr(M)
    y = Q.conj().T @ x
    n = R.shape[1]
    c = np.zeros(n, dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        c[i] = (y[i] - R[i, i + 1 :] @ c[i + 1 :]) / R[i, i]
    return c


def spectral_norm(M) -> float:
    return float(singular_values(M)[0])


@dataclass(frozen=True, eq=False)
class NullDecomposition:
    n_A: sp.Subspace
    n_B: sp.Subspace
    n_AB: sp.Subspace
    disjoint: bool
    containment_holds: bool
    equality_holds: bool
    containment_residual: float
    reverse_residual: float
    witness: dict | None = None

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.n_A.dim, self.n_B.dim, self.n_AB.dim

    def to_json(self) -> dict:
        out = {
            "dim_nA": self.n_A.dim,
            "dim_nB": self.n_B.dim,
            "dim_nAB": self.n_AB.dim,
            "disjoint": self.disjoint,
            "containment_holds": self.containment_holds,
            "equality_holds": self.equality_holds,
            "containment_residual": repr(self.containment_residual),
            "reverse_residual": repr(self.reverse_residual),
            "witness": None,
        }
        if self.witness is not None:
            w = self.witness
            out["witness"] = {
                "x": matrix_to_json(w["x"][:, None]),
                "u1": matrix_to_json(w["u1"][:, None]),
                "u2": matrix_to_json(w["u2"][:, None]),
                "residual": repr(w["residual"]),
            }
        return out


def decompose_null_spaces(A, B) -> NullDecomposition:
    """Null spaces of ``A``, ``B`` and ``AB`` and how they fit together.

    No commutativity is assumed; :func:`null_product_decompose` is the checked
    entry point.
    """
    n_A = sp.null_space(A)
    n_B = sp.null_space(B)
    n_AB = sp.null_space(A @ B, scale=spectral_norm(A) * spectral_norm(B))
    joint = sp.sum(n_A, n_B)
    disjoint = sp.intersect(n_A, n_B).dim == 0
    res = sp.containment_residual(n_AB, joint)
    rev = sp.containment_residual(joint, n_AB)
    contained = sp.contains(n_AB, joint)
    equal = contained and joint.dim == n_AB.dim
    witness = None
    if disjoint and equal and n_AB.dim > 0:
        x = n_AB.basis @ np.ones(n_AB.dim) / np.sqrt(n_AB.dim)
        M = np.hstack([n_A.basis, n_B.basis])
        coef = _least_squares(M, x)
        u1 = n_A.basis @ coef[: n_A.dim]
        u2 = n_B.basis @ coef[n_A.dim :]
        witness = {"x": x, "u1": u1, "u2": u2,
                   "residual": float(np.linalg.norm(u1 + u2 - x))}
    return NullDecomposition(n_A, n_B, n_AB, disjoint, contained, equal, res, rev, witness)


def null_product_decompose(A, B, tol: float | None = None) -> NullDecomposition:
    """Compare ``N_A + N_B`` with ``N_AB`` for a commuting pair ``A``, ``B``."""
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    cc = commute_check(A, B, tol)
    if not cc.commutes:
        raise HypothesisError(f"A and B do not commute (residual {cc.residual:.3e})")
    return decompose_null_spaces(A, B)


@dataclass(frozen=True)
class CountingReport:
    n_a: int
    n_b: int
    n_ab: int
    sum_equals: bool

    def to_json(self) -> dict:
        return {"n_a": self.n_a, "n_b": self.n_b, "n_ab": self.n_ab,
                "sum_equals": self.sum_equals}


def counting_check(A, B, tol: float | None = None) -> CountingReport:
    """``dim N_AB = dim N_A + dim N_B`` for commuting ``A``, ``B`` with disjoint null spaces."""
    nd = null_product_decompose(A, B, tol)
    if not nd.disjoint:
        raise HypothesisError("null spaces of A and B intersect nontrivially")
    a, b, ab = nd.dims
    return CountingReport(a, b, ab, ab == a + b)


@dataclass(frozen=True)
class Prop31Report:
    reduce_residuals: tuple[float, float]
    dims: tuple[int, int, int]
    conclusion_holds: bool
    residuals: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "reduce_residuals": [repr(r) for r in self.reduce_residuals],
            "dim_nA": self.dims[0],
            "dim_nB": self.dims[1],
            "dim_nAB": self.dims[2],
            "conclusion_holds": self.conclusion_holds,
            "residuals": [repr(r) for r in self.residuals],
        }


def prop31_check(A, B, tol: float | None = None) -> Prop31Report:
    """``N(AB) = N_A + N_B`` when ``N_A`` reduces ``B``.

    "Reduces" means both ``N_A`` and its orthogonal complement are invariant
    under ``B``. ``A`` and ``B`` need not commute.
    """
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    tol = residual_tol() if tol is None else tol
    P = sp.projector(sp.null_space(A))
    Iq = np.eye(A.shape[0]) - P
    r_in = fro(Iq @ B @ P)
    r_out = fro(P @ B @ Iq)
    bound = tol * (1.0 + fro(B))
    if r_in > bound or r_out > bound:
        raise HypothesisError(
            f"null space of A does not reduce B (residuals {r_in:.3e}, {r_out:.3e})"
        )
    nd = decompose_null_spaces(A, B)
    return Prop31Report(
        reduce_residuals=(r_in, r_out),
        dims=nd.dims,
        conclusion_holds=nd.equality_holds,
        residuals=(nd.containment_residual, nd.reverse_residual),
    )
