"""Finite von Neumann algebras ``M_{n_1} + ... + M_{n_m}`` (block-diagonal matrices).

The center of such an algebra is ``C^m``, so the center-valued dimension of a
projection is a vector with one entry per block: the rank of that block
divided by the block size. Ranks are integers, so every identity between
dimensions is checked in exact rational arithmetic; only the rank extraction
itself is numerical.

Murray-von Neumann equivalence of two projections in this algebra reduces to
equality of their blockwise ranks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import subspace as sp
from .config import DEFAULTS, residual_tol
from .errors import HypothesisError
from .numkernel import (
    as_square,
    dagger,
    fro,
    householder_qr,
    matrix_from_json,
    matrix_to_json,
    numeric_rank,
)

PROJECTION_TOL = 1e-9


@dataclass(frozen=True)
class BlockStructure:
    blocks: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.blocks)
        if not b or any(x < 1 for x in b):
            raise ValueError(f"block sizes must be positive and nonempty, got {b}")
        object.__setattr__(self, "blocks", b)

    @property
    def n(self) -> int:
        return int(np.sum(self.blocks))

    @property
    def slices(self) -> list[slice]:
        out, start = [], 0
        for size in self.blocks:
            out.append(slice(start, start + size))
            start += size
        return out

    def to_json(self) -> dict:
        return {"blocks": list(self.blocks)}

    @classmethod
    def from_json(cls, obj: dict) -> "BlockStructure":
        return cls(tuple(obj["blocks"]))


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class CenterValuedDimension:
    """One exact rational per block; ordered componentwise."""

    values: tuple[Fraction, ...]

    def __add__(self, other: "CenterValuedDimension") -> "CenterValuedDimension":
        return CenterValuedDimension(tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "CenterValuedDimension") -> "CenterValuedDimension":
        return CenterValuedDimension(tuple(a - b for a, b in zip(self.values, other.values)))

    def __le__(self, other: "CenterValuedDimension") -> bool:
        return all(a <= b for a, b in zip(self.values, other.values))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def is_identity(self) -> bool:
        return all(v == 1 for v in self.values)

    def to_json(self) -> list[str]:
        return [_frac_str(v) for v in self.values]


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    structure: BlockStructure
    matrix: np.ndarray

    def __post_init__(self):
        M = as_square(self.matrix, "element")
        if M.shape[0] != self.structure.n:
            raise ValueError(
                f"matrix is {M.shape[0]}x{M.shape[0]}, structure needs n={self.structure.n}"
            )
        mask = np.ones(M.shape, dtype=bool)
        for s in self.structure.slices:
            mask[s, s] = False
        if np.any(M[mask] != 0):
            raise ValueError("matrix has nonzero entries outside the diagonal blocks")
        object.__setattr__(self, "matrix", M)

    def block(self, k: int) -> np.ndarray:
        s = self.structure.slices[k]
        return self.matrix[s, s]

    def blocks(self) -> list[np.ndarray]:
        return [self.block(k) for k in range(len(self.structure.blocks))]

    @classmethod
    def from_blocks(cls, structure: BlockStructure, blocks: Sequence) -> "AlgebraElement":
        if len(blocks) != len(structure.blocks):
            raise ValueError("one block per summand required")
        M = np.zeros((structure.n, structure.n), dtype=np.complex128)
        for s, size, B in zip(structure.slices, structure.blocks, blocks):
            B = np.asarray(B, dtype=np.complex128)
            if B.shape != (size, size):
                raise ValueError(f"block of shape {B.shape}, expected {(size, size)}")
            M[s, s] = B
        return cls(structure, M)

    @classmethod
    def identity(cls, structure: BlockStructure) -> "AlgebraElement":
        return cls(structure, np.eye(structure.n, dtype=np.complex128))

    @classmethod
    def zero(cls, structure: BlockStructure) -> "AlgebraElement":
        return cls(structure, np.zeros((structure.n, structure.n), dtype=np.complex128))

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_structure(self, other)
        return AlgebraElement.from_blocks(
            self.structure, [a @ b for a, b in zip(self.blocks(), other.blocks())]
        )

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.structure, dagger(self.matrix))

    def to_json(self) -> dict:
        return {"structure": self.structure.to_json(), "matrix": matrix_to_json(self.matrix)}

    @classmethod
    def from_json(cls, obj: dict) -> "AlgebraElement":
        return cls(BlockStructure.from_json(obj["structure"]), matrix_from_json(obj["matrix"]))


def _same_structure(*elements: AlgebraElement) -> BlockStructure:
    st = elements[0].structure
    for e in elements[1:]:
        if e.structure != st:
            raise ValueError(f"structure mismatch: {st.blocks} vs {e.structure.blocks}")
    return st


def _blockwise(fn: Callable[..., np.ndarray], *elements: AlgebraElement) -> AlgebraElement:
    st = _same_structure(*elements)
    per_block = zip(*(e.blocks() for e in elements))
    return AlgebraElement.from_blocks(st, [fn(*bs) for bs in per_block])


def is_projection(E: AlgebraElement, tol: float = PROJECTION_TOL) -> bool:
    P = E.matrix
    return fro(P @ P - P) <= tol and fro(P - dagger(P)) <= tol


def _require_projection(E: AlgebraElement, name: str = "E") -> None:
    if not is_projection(E):
        raise ValueError(f"{name} is not a projection within {PROJECTION_TOL:g}")


def dimension(E: AlgebraElement) -> CenterValuedDimension:
    """Center-valued dimension: ``rank(E_k) / n_k`` for each block ``k``."""
    _require_projection(E)
    values = []
    for B, size in zip(E.blocks(), E.structure.blocks):
        values.append(Fraction(numeric_rank(B, tol=DEFAULTS.rank), size))
    return CenterValuedDimension(tuple(values))


def range_projection(T: AlgebraElement) -> AlgebraElement:
    return _blockwise(lambda B: sp.projector(sp.range_space(B)), T)


def null_projection(T: AlgebraElement) -> AlgebraElement:
    return _blockwise(lambda B: sp.projector(sp.null_space(B)), T)


def meet(E: AlgebraElement, F: AlgebraElement) -> AlgebraElement:
    _require_projection(E, "E")
    _require_projection(F, "F")
    return _blockwise(
        lambda a, b: sp.projector(sp.intersect(sp.range_space(a), sp.range_space(b))), E, F
    )


def join(E: AlgebraElement, F: AlgebraElement) -> AlgebraElement:
    _require_projection(E, "E")
    _require_projection(F, "F")
    return _blockwise(
        lambda a, b: sp.projector(sp.sum(sp.range_space(a), sp.range_space(b))), E, F
    )


def trace(A: AlgebraElement) -> tuple[complex, ...]:
    """Normalised trace ``tr(A_k) / n_k`` of each block."""
    return tuple(complex(np.trace(B) / B.shape[0]) for B in A.blocks())


@dataclass(frozen=True)
class RankNullityReport:
    delta_range: CenterValuedDimension
    delta_null: CenterValuedDimension
    identity_holds: bool

    def to_json(self) -> dict:
        return {
            "delta_range": self.delta_range.to_json(),
            "delta_null": self.delta_null.to_json(),
            "identity_holds": self.identity_holds,
        }


def rank_nullity_check(T: AlgebraElement) -> RankNullityReport:
    """``Delta(R(T)) + Delta(N(T)) = I`` checked exactly, block by block."""
    dr = dimension(range_projection(T))
    dn = dimension(null_projection(T))
    return RankNullityReport(dr, dn, (dr + dn).is_identity())


@dataclass(frozen=True)
class InequalityReport:
    delta_E: CenterValuedDimension
    delta_meet: CenterValuedDimension
    delta_F: CenterValuedDimension
    delta_range_TE: CenterValuedDimension
    hypothesis_residual: float
    holds: bool
    range_identity_holds: bool
    special_case_applies: bool
    special_case_holds: bool | None

    def to_json(self) -> dict:
        return {
            "delta_E": self.delta_E.to_json(),
            "delta_null_T_meet_E": self.delta_meet.to_json(),
            "delta_F": self.delta_F.to_json(),
            "delta_range_TE": self.delta_range_TE.to_json(),
            "hypothesis_residual": repr(self.hypothesis_residual),
            "holds": self.holds,
            "range_identity_holds": self.range_identity_holds,
            "special_case_applies": self.special_case_applies,
            "special_case_holds": self.special_case_holds,
        }


def dimension_inequality_check(
    T: AlgebraElement, E: AlgebraElement, F: AlgebraElement, tol: float | None = None
) -> InequalityReport:
    """Check ``Delta(E) - Delta(N(T) ^ E) <= Delta(F)`` under ``F T E = T E``.

    Also reports the intermediate equality
    ``Delta(E) - Delta(N(T) ^ E) = Delta(R(TE))`` and, when ``N(T) ^ E = 0``,
    the special case ``Delta(E) <= Delta(F)``.
    """
    _same_structure(T, E, F)
    _require_projection(E, "E")
    _require_projection(F, "F")
    tol = residual_tol() if tol is None else tol
    TE = T @ E
    residual = fro((F @ TE).matrix - TE.matrix)
    if residual > tol * max(1.0, fro(T.matrix)):
        raise HypothesisError(f"FTE != TE (residual {residual:.3e})")
    m = meet(null_projection(T), E)
    dE, dm, dF = dimension(E), dimension(m), dimension(F)
    d_rte = dimension(range_projection(TE))
    lhs = dE - dm
    special = dm.is_zero()
    return InequalityReport(
        delta_E=dE,
        delta_meet=dm,
        delta_F=dF,
        delta_range_TE=d_rte,
        hypothesis_residual=residual,
        holds=lhs <= dF,
        range_identity_holds=lhs == d_rte,
        special_case_applies=special,
        special_case_holds=(dE <= dF) if special else None,
    )


@dataclass(frozen=True)
class LatticeReport:
    lhs: CenterValuedDimension
    rhs: CenterValuedDimension
    holds: bool

    def to_json(self) -> dict:
        return {"delta_E_plus_delta_F": self.lhs.to_json(),
                "delta_join_plus_delta_meet": self.rhs.to_json(),
                "holds": self.holds}


def lattice_dimension_identity(E: AlgebraElement, F: AlgebraElement) -> LatticeReport:
    """``Delta(E) + Delta(F) = Delta(E v F) + Delta(E ^ F)`` in exact arithmetic."""
    lhs = dimension(E) + dimension(F)
    rhs = dimension(join(E, F)) + dimension(meet(E, F))
    return LatticeReport(lhs, rhs, lhs == rhs)


def projection_from_ranks(
    structure: BlockStructure, ranks: Iterable[int], rng: np.random.Generator
) -> AlgebraElement:
    """Random projection with the given rank in each block (``U D U^*``)."""
    blocks = []
    for size, r in zip(structure.blocks, ranks):
        if not 0 <= r <= size:
            raise ValueError(f"rank {r} outside [0, {size}]")
        X = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
        Q = householder_qr(X)[0]
        blocks.append(Q[:, :r] @ dagger(Q[:, :r]))
    return AlgebraElement.from_blocks(structure, blocks)
