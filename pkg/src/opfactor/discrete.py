"""Differentiation and translation on a periodic grid, diagonalised by the FFT.

On ``n`` equispaced points of a circle of length ``L`` the Fourier modes
``e^{2 pi i k x / L}``, ``k in {-n/2+1, ..., n/2}``, are eigenvectors of both
the spectral derivative ``D`` (eigenvalue ``2 pi i k / L``) and the translation
``U_t`` (eigenvalue ``e^{2 pi i k t / L}``), so ``U_t = exp(t D)`` and
``D = iH`` with ``H = -iD`` Hermitian.

Kernels of ``D + alpha I`` on the circle are trivial for real ``alpha != 0``;
the factored-ODE demo therefore uses imaginary shifts ``alpha = -i omega``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import subspace as sp
from .factorsolve import NullDecomposition, null_product_decompose
from .numkernel import dagger, fft, ifft, singular_values, svd


@dataclass(frozen=True)
class PeriodicGrid:
    n: int
    length: float = 2 * np.pi

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 2, got {self.n}")
        if not self.length > 0:
            raise ValueError("grid length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer frequencies in FFT order; index ``n/2`` carries ``k = n/2``."""
        j = np.arange(self.n)
        return np.where(j <= self.n // 2, j, j - self.n)

    @property
    def angular(self) -> np.ndarray:
        return 2 * np.pi * self.wavenumbers / self.length

    def mode(self, k: int) -> np.ndarray:
        return np.exp(2j * np.pi * k * self.points / self.length)


@dataclass(frozen=True, eq=False)
class GridOperator:
    grid: PeriodicGrid
    symbol: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.symbol, dtype=np.complex128).ravel()
        if s.size != self.grid.n:
            raise ValueError(f"symbol has {s.size} entries, grid has {self.grid.n}")
        object.__setattr__(self, "symbol", s)

    def __call__(self, v) -> np.ndarray:
        return ifft(self.symbol * fft(v))

    def __matmul__(self, other: "GridOperator") -> "GridOperator":
        if other.grid != self.grid:
            raise ValueError("operators live on different grids")
        return GridOperator(self.grid, self.symbol * other.symbol)

    def shifted(self, c: complex) -> "GridOperator":
        """``self + c I``."""
        return GridOperator(self.grid, self.symbol + c)

    def dense(self) -> np.ndarray:
        eye = np.eye(self.grid.n, dtype=np.complex128)
        return np.stack([self(eye[:, j]) for j in range(self.grid.n)], axis=1)


def differentiation_operator(grid: PeriodicGrid) -> GridOperator:
    return GridOperator(grid, 1j * grid.angular)


def translation_group(grid: PeriodicGrid, t: float) -> GridOperator:
    """``(U_t f)(s) = f(s + t)`` on band-limited grid functions."""
    return GridOperator(grid, np.exp(1j * grid.angular * t))


@dataclass(frozen=True)
class ConvergenceReport:
    step_sizes: tuple[float, ...]
    errors: tuple[float, ...]
    fitted_slope: float | None

    def to_json(self) -> dict:
        return {
            "step_sizes": list(self.step_sizes),
            "errors": list(self.errors),
            "fitted_slope": self.fitted_slope,
        }


def fitted_slope(steps, errors) -> float | None:
    """Least-squares slope of ``log(error)`` against ``log(step)``."""
    t = np.asarray(steps, dtype=float)
    e = np.asarray(errors, dtype=float)
    if t.size < 2 or np.any(e <= 0):
        return None
    lx, ly = np.log(t), np.log(e)
    lx0 = lx - lx.mean()
    return float(lx0 @ (ly - ly.mean()) / (lx0 @ lx0))


def stone_generator_check(
    grid: PeriodicGrid, f, step_sizes, scheme: str = "forward"
) -> ConvergenceReport:
    """Errors of the difference quotient ``(U_t f - f)/t`` against ``D f``.

    ``scheme="central"`` uses ``(U_t f - U_{-t} f)/(2t)`` instead; expected
    slopes are 1 and 2 respectively.
    """
    steps = [float(t) for t in step_sizes]
    if not steps:
        raise ValueError("need at least one step size")
    if any(t <= 0 for t in steps):
        raise ValueError("step sizes must be positive")
    f = np.asarray(f, dtype=np.complex128).ravel()
    if f.size != grid.n:
        raise ValueError(f"f has {f.size} samples, grid has {grid.n}")
    fh = fft(f)
    high = np.abs(grid.wavenumbers) > grid.n // 4
    if np.linalg.norm(fh[high]) > 1e-10 * max(np.linalg.norm(fh), 1e-300):
        raise ValueError("f is not band-limited to |k| <= n/4")
    Df = differentiation_operator(grid)(f)
    errors = []
    for t in steps:
        if scheme == "forward":
            q = (translation_group(grid, t)(f) - f) / t
        elif scheme == "central":
            q = (translation_group(grid, t)(f) - translation_group(grid, -t)(f)) / (2 * t)
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        errors.append(float(np.linalg.norm(q - Df)))
    return ConvergenceReport(tuple(steps), tuple(errors), fitted_slope(steps, errors))


def band_limited(grid: PeriodicGrid, rng: np.random.Generator, kmax: int | None = None) -> np.ndarray:
    """Random grid function whose spectrum is supported on ``|k| <= kmax`` (default n/4)."""
    kmax = grid.n // 4 if kmax is None else kmax
    coef = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
    coef[np.abs(grid.wavenumbers) > kmax] = 0
    return ifft(coef * grid.n)


def factored_ode_demo(grid: PeriodicGrid, omega1: int, omega2: int) -> NullDecomposition:
    """Null spaces of ``A = D - i w1 I``, ``B = D - i w2 I`` and of ``AB``.

    ``w_j = 2 pi omega_j / L``. Distinct frequencies give dimensions (1, 1, 2);
    equal frequencies give (1, 1, 1) since ``D`` is normal.
    """
    limit = grid.n // 2 - 1
    for w in (omega1, omega2):
        if int(w) != w or abs(w) > limit:
            raise ValueError(f"frequency {w} outside the integer band |w| <= {limit}")
    D = differentiation_operator(grid)
    scale = 2 * np.pi / grid.length
    A = D.shifted(-1j * scale * omega1).dense()
    B = D.shifted(-1j * scale * omega2).dense()
    return null_product_decompose(A, B)


@dataclass(frozen=True)
class WaveReport:
    dim_nA: int
    dim_nB: int
    dim_nAB: int
    dim_intersection: int
    equality: bool
    witness_residual: float
    dense_agrees: bool | None

    def to_json(self) -> dict:
        return {
            "dim_nA": self.dim_nA,
            "dim_nB": self.dim_nB,
            "dim_nAB": self.dim_nAB,
            "dim_intersection": self.dim_intersection,
            "equality": self.equality,
            "witness_residual": repr(self.witness_residual),
            "dense_agrees": self.dense_agrees,
        }


def _mode_basis(gx: PeriodicGrid, gy: PeriodicGrid, mask: np.ndarray) -> sp.Subspace:
    """Orthonormal 2-D Fourier modes selected by ``mask[a, b]``; index ``j*m + l``."""
    n, m = gx.n, gy.n
    cols = []
    for a, b in zip(*np.nonzero(mask)):
        ex = np.exp(2j * np.pi * a * np.arange(n) / n)
        ey = np.exp(2j * np.pi * b * np.arange(m) / m)
        cols.append(np.kron(ex, ey) / np.sqrt(n * m))
    basis = np.stack(cols, axis=1) if cols else np.zeros((n * m, 0), dtype=np.complex128)
    return sp.Subspace(n * m, basis)


def _min_norm_coefficients(M: np.ndarray, x: np.ndarray) -> np.ndarray:
    d = svd(M, full_u=False)
    s = d.singular_values
    r = int(np.sum(s > 1e-12 * s[0])) if s[0] > 0 else 0
    r = min(r, d.U.shape[1])
    y = dagger(d.U[:, :r]) @ x
    return d.V[:, :r] @ (y / s[:r])


def wave_factorization_demo(
    gx: PeriodicGrid, gy: PeriodicGrid, u=None, dense_limit: int = 16
) -> WaveReport:
    """Null spaces of ``D_x``, ``D_y`` and ``D_x D_y`` on an ``n x m`` torus grid.

    Null spaces are read off the Fourier symbols. ``u`` (default: the constant
    function) is split as ``F(x) + G(y)`` by minimum-norm least squares and the
    residual reported. When ``n * m <= dense_limit`` the dimensions are also
    recomputed from the densified operators.
    """
    sx = differentiation_operator(gx).symbol
    sy = differentiation_operator(gy).symbol
    SX, SY = np.meshgrid(sx, sy, indexing="ij")
    n_A = _mode_basis(gx, gy, SX == 0)
    n_B = _mode_basis(gx, gy, SY == 0)
    n_AB = _mode_basis(gx, gy, SX * SY == 0)
    joint = sp.sum(n_A, n_B)
    cosines = singular_values(dagger(n_A.basis) @ n_B.basis)
    inter = int(np.sum(cosines >= 1 - 1e-9))
    equality = sp.equal(joint, n_AB)

    N = gx.n * gy.n
    x = np.ones(N, dtype=np.complex128) if u is None else np.asarray(u, dtype=np.complex128).ravel()
    M = np.hstack([n_A.basis, n_B.basis])
    coef = _min_norm_coefficients(M, x)
    witness = float(np.linalg.norm(M @ coef - x))

    dense_agrees = None
    if N <= dense_limit:
        Dx = differentiation_operator(gx).dense()
        Dy = differentiation_operator(gy).dense()
        A = np.kron(Dx, np.eye(gy.n))
        B = np.kron(np.eye(gx.n), Dy)
        nd = null_product_decompose(A, B)
        dense_agrees = nd.dims == (n_A.dim, n_B.dim, n_AB.dim) and nd.equality_holds
    return WaveReport(n_A.dim, n_B.dim, n_AB.dim, inter, equality, witness, dense_agrees)
