"""Seeded randomised property suites.

Each suite is a function ``trial(rng, index) -> TrialResult``. ``run_suite``
derives one generator per trial from ``(seed ^ index, crc32(name))``, so a
trial's outcome depends only on the seed, its index and the suite name; trials
can run in any order or in parallel without changing results.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import discrete as dc
from . import factorsolve as fs
from . import operators as op
from . import subspace as sp
from . import vnalg as va
from .numkernel import dagger, fro, hermitian_eig, householder_qr, svd, unitary_exponential

STRUCTURES = (va.BlockStructure((5,)), va.BlockStructure((2, 3)), va.BlockStructure((1, 2, 4)))


@dataclass
class TrialResult:
    ok: bool
    info: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: list[int]
    results: list[TrialResult]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"name": self.name, "trials": self.trials, "passed": self.passed,
                "failures": self.failures[:20]}


def trial_rng(seed: int, index: int, name: str) -> np.random.Generator:
    return np.random.default_rng((seed ^ index, zlib.crc32(name.encode())))


def cgauss(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    return householder_qr(cgauss(rng, n, n))[0]


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    X = cgauss(rng, n, n)
    return (X + dagger(X)) / 2


def random_low_rank(rng: np.random.Generator, m: int, n: int, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros((m, n), dtype=np.complex128)
    return cgauss(rng, m, r) @ cgauss(rng, r, n)


# ---------------------------------------------------------------- kernels

def trial_kernels(rng, index) -> TrialResult:
    n = int(rng.integers(1, 9))
    m = int(rng.integers(1, 9))
    M = cgauss(rng, m, n)
    Q, R = householder_qr(M)
    qr_res = fro(M - Q @ R) / fro(M)
    H = random_hermitian(rng, n)
    ed = hermitian_eig(H)
    V = ed.vectors
    eig_res = fro(H @ V - V * ed.eigenvalues) / max(fro(H), 1e-300)
    unit_res = fro(dagger(V) @ V - np.eye(n))
    d = svd(M)
    k = min(m, n)
    S = np.zeros((m, n))
    S[:k, :k] = np.diag(d.singular_values)
    svd_res = fro(M - d.U @ S @ dagger(d.V)) / fro(M)
    s, t = rng.normal(size=2)
    group = fro(unitary_exponential(H, s) @ unitary_exponential(H, t) - unitary_exponential(H, s + t))
    ok = (qr_res <= max(m, n) * 1e-12 and eig_res <= n * 1e-10 and unit_res <= n * 1e-12
          and svd_res <= max(m, n) * 1e-10 and group < 1e-9)
    return TrialResult(ok, {"qr": qr_res, "eig": eig_res, "svd": svd_res, "group": group})


# ---------------------------------------------------------------- subspaces

def trial_angle(rng, index) -> TrialResult:
    n = int(rng.integers(3, 7))
    k1 = int(rng.integers(1, n))
    k2 = int(rng.integers(1, n - k1 + 1))
    overlap = index % 2 == 1
    X = cgauss(rng, n, k1)
    Y = cgauss(rng, n, k2)
    if overlap:
        Y[:, 0] = X @ cgauss(rng, k1)
    S1, S2 = sp.Subspace.span(X), sp.Subspace.span(Y)
    a12, a21 = sp.angle(S1, S2), sp.angle(S2, S1)
    inter = sp.intersect(S1, S2).dim
    grassmann = S1.dim + S2.dim == sp.sum(S1, S2).dim + inter
    ok = (a12 > 0) == (inter == 0) and (inter > 0) == overlap and abs(a12 - a21) < 1e-12 and grassmann
    return TrialResult(ok, {"angle": a12, "intersection": inter})


# ---------------------------------------------------------------- dimension theory

def random_element(rng, structure: va.BlockStructure) -> va.AlgebraElement:
    blocks = []
    for size in structure.blocks:
        r = int(rng.integers(0, size + 1))
        blocks.append(random_low_rank(rng, size, size, r))
    return va.AlgebraElement.from_blocks(structure, blocks)


def random_projection(rng, structure: va.BlockStructure) -> va.AlgebraElement:
    ranks = [int(rng.integers(0, s + 1)) for s in structure.blocks]
    return va.projection_from_ranks(structure, ranks, rng)


def trial_rank_nullity(rng, index) -> TrialResult:
    st = STRUCTURES[index % len(STRUCTURES)]
    T = random_element(rng, st)
    rep = va.rank_nullity_check(T)
    return TrialResult(rep.identity_holds, {"structure": st.blocks,
                                            "delta_range": rep.delta_range.to_json(),
                                            "delta_null": rep.delta_null.to_json()})


def trial_dim_inequality(rng, index) -> TrialResult:
    st = STRUCTURES[index % len(STRUCTURES)]
    T = random_element(rng, st)
    E = random_projection(rng, st)
    F = va.range_projection(T @ E)
    rep = va.dimension_inequality_check(T, E, F)
    ok = rep.holds and rep.range_identity_holds and rep.hypothesis_residual < 1e-9
    if rep.special_case_applies:
        ok = ok and bool(rep.special_case_holds)
    return TrialResult(ok, {"hypothesis_residual": rep.hypothesis_residual, "holds": rep.holds})


def trial_lattice(rng, index) -> TrialResult:
    st = STRUCTURES[index % len(STRUCTURES)]
    eb, fb = [], []
    for size in st.blocks:
        Q = random_unitary(rng, size)
        c = int(rng.integers(0, size + 1))
        a = int(rng.integers(0, size - c + 1))
        b = int(rng.integers(0, size - c + 1))
        common = Q[:, :c]
        X = np.hstack([common, cgauss(rng, size, a)])
        Y = np.hstack([common, cgauss(rng, size, b)])
        eb.append(sp.projector(sp.Subspace.span(X)))
        fb.append(sp.projector(sp.Subspace.span(Y)))
    E = va.AlgebraElement.from_blocks(st, eb)
    F = va.AlgebraElement.from_blocks(st, fb)
    rep = va.lattice_dimension_identity(E, F)
    return TrialResult(rep.holds, rep.to_json())


# ---------------------------------------------------------------- null spaces of products

SPECTRUM = (-2.0, -1.0, 0.0, 1.0, 2.0, 3.0)


def commuting_polynomial_pair(rng, disjoint: bool):
    """``A = p(M)``, ``B = q(M)`` for one random non-normal ``M``.

    ``M`` has at least two distinct eigenvalues drawn from :data:`SPECTRUM`
    and may carry a 2x2 Jordan block. ``p`` and ``q`` vanish on chosen eigenvalues (disjoint root
    sets when ``disjoint``) and carry a random complex factor that vanishes
    nowhere on the spectrum.
    """
    n = int(rng.integers(3, 7))
    values = list(rng.choice(SPECTRUM, size=n, replace=True))
    while len(set(values)) < 2:
        values = list(rng.choice(SPECTRUM, size=n, replace=True))
    J = np.diag(np.array(values, dtype=np.complex128))
    order = np.argsort(values, kind="stable")
    J = J[np.ix_(order, order)]
    sv = np.array(values)[order]
    for i in range(n - 1):
        if sv[i] == sv[i + 1] and rng.random() < 0.5:
            J[i, i + 1] = 1.0
            break
    S = np.eye(n) + 0.3 * cgauss(rng, n, n) / np.sqrt(n)
    M = S @ J @ np.linalg.inv(S)
    distinct = sorted(set(values))
    rng.shuffle(distinct)
    # proper subsets only: a polynomial vanishing on the whole spectrum can be
    # the zero operator, which no relative rank threshold detects
    na = int(rng.integers(1, len(distinct)))
    ra = distinct[:na]
    if disjoint:
        rest = distinct[na:]
        rb = rest[: int(rng.integers(0, len(rest) + 1))]
    else:
        rb = [ra[0]] + distinct[na : na + int(rng.integers(0, len(distinct) - na))]

    def poly(rts):
        P = np.eye(n, dtype=np.complex128)
        for r in rts:
            P = P @ (M - r * np.eye(n))
            if rng.random() < 0.3:
                P = P @ (M - r * np.eye(n))
        shift = 10.0 + 5.0 * abs(cgauss(rng, 1)[0])
        return P @ (M + shift * np.exp(1j * rng.uniform(0, 2 * np.pi)) * np.eye(n))

    return poly(ra), poly(rb)


def trial_commuting_products(rng, index) -> TrialResult:
    disjoint = index % 2 == 0
    A, B = commuting_polynomial_pair(rng, disjoint)
    nd = fs.null_product_decompose(A, B)
    a, b, ab = nd.dims
    ok = nd.containment_holds and nd.containment_residual < 1e-8
    if disjoint:
        ok = ok and nd.disjoint and ab == a + b
    return TrialResult(ok, {"engineered_disjoint": disjoint, "disjoint": nd.disjoint,
                            "dims": nd.dims, "containment_residual": nd.containment_residual})


def trial_hermitian_products(rng, index) -> TrialResult:
    n = int(rng.integers(3, 7))
    U = random_unitary(rng, n)
    da = rng.uniform(0.5, 3.0, size=n) * rng.choice([-1, 1], size=n)
    db = rng.uniform(0.5, 3.0, size=n) * rng.choice([-1, 1], size=n)
    da[0] = db[0] = 0.0
    for j in range(1, n):
        u = rng.random()
        if u < 0.25:
            da[j] = 0.0
        elif u < 0.5:
            db[j] = 0.0
        elif u < 0.6:
            da[j] = db[j] = 0.0
    A = (U * da) @ dagger(U)
    B = (U * db) @ dagger(U)
    nd = fs.null_product_decompose(A, B)
    joint = sp.sum(nd.n_A, nd.n_B)
    ok = (not nd.disjoint and nd.equality_holds and joint.dim == nd.n_AB.dim
          and nd.containment_residual < 1e-8 and nd.reverse_residual < 1e-8)
    return TrialResult(ok, {"dims": nd.dims, "containment_residual": nd.containment_residual,
                            "reverse_residual": nd.reverse_residual,
                            "disjoint": nd.disjoint})


def trial_counting(rng, index) -> TrialResult:
    n = int(rng.integers(3, 7))
    U = random_unitary(rng, n)
    w = rng.choice(SPECTRUM, size=n).astype(float)
    H = (U * w) @ dagger(U)
    a, b = rng.choice(sorted(set(w)) + [7.5], size=2, replace=False)
    rep = fs.counting_check(H - a * np.eye(n), H - b * np.eye(n))
    return TrialResult(rep.sum_equals, rep.to_json())


def trial_reducing(rng, index) -> TrialResult:
    n = int(rng.integers(3, 7))
    k = int(rng.integers(1, n))
    U = random_unitary(rng, n)
    inner = np.zeros((n, n), dtype=np.complex128)
    inner[k:, k:] = cgauss(rng, n - k, n - k)
    A = U @ inner @ dagger(U)
    Bb = np.zeros((n, n), dtype=np.complex128)
    Bb[:k, :k] = cgauss(rng, k, k)
    Bb[k:, k:] = random_low_rank(rng, n - k, n - k, int(rng.integers(0, n - k + 1)))
    B = U @ Bb @ dagger(U)
    rep = fs.prop31_check(A, B)
    return TrialResult(rep.conclusion_holds, rep.to_json())


# ---------------------------------------------------------------- commutativity and stability

PATTERNS = ("commuting", "C-stable-only", "C*-stable-only", "generic")


def stability_pair(rng, pattern: str):
    n = int(rng.integers(2, 7))
    k = int(rng.integers(1, n))
    U = random_unitary(rng, n)
    C = cgauss(rng, n, n)
    if pattern in ("commuting", "C-stable-only"):
        C[k:, :k] = 0
    if pattern in ("commuting", "C*-stable-only"):
        C[:k, k:] = 0
    P = np.zeros((n, n))
    P[:k, :k] = np.eye(k)
    return U @ C @ dagger(U), U @ P @ dagger(U)


def trial_stability(rng, index) -> TrialResult:
    pattern = PATTERNS[index % len(PATTERNS)]
    C, E = stability_pair(rng, pattern)
    rep = op.proper_stability(C, E)
    flags = (rep.stable_under_C, rep.stable_under_C_adjoint, rep.commutes)
    expected = {
        "commuting": (True, True, True),
        "C-stable-only": (True, False, False),
        "C*-stable-only": (False, True, False),
        "generic": (False, False, False),
    }[pattern]
    biconditional = rep.commutes == (rep.stable_under_C and rep.stable_under_C_adjoint)
    impossible = flags == (True, True, False)
    return TrialResult(biconditional and not impossible and flags == expected,
                       {"pattern": pattern, "flags": flags, "biconditional": biconditional,
                        "impossible_pattern": impossible})


def commuting_hermitian_general(rng):
    n = int(rng.integers(2, 7))
    U = random_unitary(rng, n)
    vals = rng.choice([-1.0, 0.5, 2.0], size=n)
    B = (U * vals) @ dagger(U)
    # C commutes with B iff it preserves every eigenspace of B
    Cd = np.zeros((n, n), dtype=np.complex128)
    for v in set(vals):
        idx = np.nonzero(vals == v)[0]
        Cd[np.ix_(idx, idx)] = cgauss(rng, idx.size, idx.size)
    return B, U @ Cd @ dagger(U)


def trial_adjoint_transfer(rng, index) -> TrialResult:
    B, C = commuting_hermitian_general(rng)
    rep = op.adjoint_commute_transfer(B, C)
    residual = fro(B @ dagger(C) - dagger(C) @ B)
    ok = rep.commutes_with_C.commutes and rep.transfer_holds and residual < 1e-8
    return TrialResult(ok, {"residual": residual})


def hermitian_pair(rng, commuting: bool):
    n = int(rng.integers(2, 7))
    if not commuting:
        return random_hermitian(rng, n), random_hermitian(rng, n)
    U = random_unitary(rng, n)
    h = rng.choice([-1.0, 0.0, 1.0, 2.5], size=n)
    Kd = np.zeros((n, n), dtype=np.complex128)
    for v in set(h):
        idx = np.nonzero(h == v)[0]
        Kd[np.ix_(idx, idx)] = random_hermitian(rng, idx.size)
    return (U * h) @ dagger(U), U @ Kd @ dagger(U)


def trial_spectral_commute(rng, index) -> TrialResult:
    commuting = index % 2 == 0
    H, K = hermitian_pair(rng, commuting)
    rep = op.spectral_commute(H, K, tol=1e-8)
    ok = rep.equivalence_holds and rep.product_equal == commuting
    return TrialResult(ok, {"constructed_commuting": commuting,
                            "product_equal": rep.product_equal,
                            "all_pairwise": rep.all_pairwise})


# ---------------------------------------------------------------- ODEs

ROOT_POOL = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 1j, -1j, 1 + 1j, -1 + 0.5j)


def trial_ode(rng, index) -> TrialResult:
    k = int(rng.integers(1, 4))
    picks = rng.choice(len(ROOT_POOL), size=k, replace=False)
    planted = {}
    for i in picks:
        planted[complex(ROOT_POOL[i])] = int(rng.integers(1, 4))
    if index % 3 == 0:
        r0 = next(iter(planted))
        planted[r0] = 3
    coeffs = np.array([1.0 + 0j])
    for r, m in planted.items():
        for _ in range(m):
            coeffs = np.convolve(coeffs, [1.0, -r])
    scale = np.exp(1j * rng.uniform(0, 2 * np.pi)) if rng.random() < 0.3 else 1.0
    p = fs.Polynomial(tuple(scale * coeffs[::-1]))
    found = fs.roots(p)
    match = len(found) == len(planted) and all(
        any(abs(rc.root - r) < 1e-6 and rc.multiplicity == m for rc in found)
        for r, m in planted.items()
    )
    basis = fs.solve_ode(p)
    residual = fs.ode_residual(basis, p, np.linspace(-1, 1, 11))
    det = fs.abs_det(fs.wronskian(basis, 0.0))
    ok = match and residual < 1e-10 and det > 1e-8 and len(basis) == p.degree
    return TrialResult(ok, {"planted": [[r.real, r.imag, m] for r, m in planted.items()],
                            "residual": residual, "wronskian": det})


# ---------------------------------------------------------------- periodic grid

def trial_stone(rng, index) -> TrialResult:
    g = dc.PeriodicGrid(64, 2 * np.pi)
    f = dc.band_limited(g, rng)
    rep = dc.stone_generator_check(g, f, [1e-1, 1e-2, 1e-3, 1e-4])
    ok = rep.fitted_slope is not None and 0.9 <= rep.fitted_slope <= 1.1
    return TrialResult(ok, {"slope": rep.fitted_slope})


def trial_translation(rng, index) -> TrialResult:
    n = int(2 ** rng.integers(2, 7))
    g = dc.PeriodicGrid(n, float(rng.uniform(1, 10)))
    f = cgauss(rng, n)
    s, t = rng.normal(size=2)
    lhs = dc.translation_group(g, s)(dc.translation_group(g, t)(f))
    rhs = dc.translation_group(g, s + t)(f)
    group = float(np.linalg.norm(lhs - rhs))
    D = dc.differentiation_operator(g).dense()
    skew = fro(D + dagger(D))
    return TrialResult(group < 1e-9 and skew < 1e-10, {"group": group, "skew": skew})


def trial_factored(rng, index) -> TrialResult:
    g = dc.PeriodicGrid(8, 2 * np.pi)
    w1, w2 = (int(x) for x in rng.integers(-3, 4, size=2))
    nd = dc.factored_ode_demo(g, w1, w2)
    expected = (1, 1, 1) if w1 == w2 else (1, 1, 2)
    return TrialResult(nd.dims == expected and nd.equality_holds, {"w": (w1, w2), "dims": nd.dims})


def trial_wave(rng, index) -> TrialResult:
    n, m = (int(2 ** x) for x in rng.integers(1, 5, size=2))
    rep = dc.wave_factorization_demo(dc.PeriodicGrid(n), dc.PeriodicGrid(m))
    ok = ((rep.dim_nA, rep.dim_nB, rep.dim_nAB) == (m, n, n + m - 1)
          and rep.dim_intersection == 1 and rep.equality and rep.dense_agrees is not False)
    return TrialResult(ok, {"n": n, "m": m, "dims": (rep.dim_nA, rep.dim_nB, rep.dim_nAB)})


def trial_nilpotent(rng, index) -> TrialResult:
    A = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    nd = fs.null_product_decompose(A, A)
    ok = nd.dims == (1, 1, 2) and nd.containment_holds and not nd.equality_holds
    return TrialResult(ok, {"dims": nd.dims})


SUITES: dict[str, Callable[[np.random.Generator, int], TrialResult]] = {
    "kernels": trial_kernels,
    "angle": trial_angle,
    "nilpotent": trial_nilpotent,
    "rank-nullity": trial_rank_nullity,
    "dim-inequality": trial_dim_inequality,
    "lattice-id": trial_lattice,
    "commuting-products": trial_commuting_products,
    "hermitian-products": trial_hermitian_products,
    "counting": trial_counting,
    "reducing-null-space": trial_reducing,
    "stability": trial_stability,
    "adjoint-transfer": trial_adjoint_transfer,
    "spectral-commute": trial_spectral_commute,
    "ode": trial_ode,
    "stone": trial_stone,
    "translation": trial_translation,
    "factored-demo": trial_factored,
    "wave-demo": trial_wave,
}


def run_suite(name: str, seed: int, trials: int) -> SuiteResult:
    fn = SUITES[name]
    results, failures = [], []
    for i in range(trials):
        try:
            res = fn(trial_rng(seed, i, name), i)
        except ValueError as exc:
            res = TrialResult(False, {"error": str(exc)})
        results.append(res)
        if not res.ok:
            failures.append(i)
    return SuiteResult(name, trials, failures, results)


def run_all(seed: int, trials: int) -> list[SuiteResult]:
    return [run_suite(name, seed, trials) for name in SUITES]
