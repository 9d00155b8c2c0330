"""
Boundary conditions A (y_0, f_0 Delta y_0)^T + B (y_N, f_N Delta y_N)^T = 0.

A boundary condition is an equivalence class of rank-2 2x4 matrices (A|B)
under left multiplication by invertible 2x2 matrices. This module normalizes
representatives into the coordinate charts of the condition space, tests
self-adjointness (A E A* = B E B*), classifies degenerated / separated /
coupled conditions and builds the canonical self-adjoint forms

    S_{alpha,beta} = [[cos a, -sin a, 0, 0], [0, 0, cos b, -sin b]]
    [e^{i gamma} K | -I],   K real with det K = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Sequence, Tuple

import numpy as np

from src.models import ErrorCode, SLPError
from src.slp_core import DEFAULT_TOLERANCES, Mat2, SolutionSequence, Tolerances, as_mat2, numeric_rank

# Symplectic form E.
E = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)

_I2 = np.eye(2, dtype=complex)


class ChartId(str, Enum):
    N12 = "N12"
    N13 = "N13"
    N14 = "N14"
    N23 = "N23"
    N24 = "N24"
    N34 = "N34"
    O13 = "O13"
    O14 = "O14"
    O23 = "O23"
    O24 = "O24"

    @property
    def is_self_adjoint_chart(self) -> bool:
        return self.value.startswith("O")

    @property
    def general_chart(self) -> "ChartId":
        """The N-chart an O-chart lives in (identity for N-charts)."""
        return ChartId("N" + self.value[1:])

    @property
    def pivot_columns(self) -> Tuple[int, int]:
        return _PIVOTS[self.general_chart][0]

    @property
    def pivot_block(self) -> np.ndarray:
        return _PIVOTS[self.general_chart][1]

    @property
    def free_columns(self) -> Tuple[int, int]:
        pivots = self.pivot_columns
        c1, c2 = (c for c in range(4) if c not in pivots)
        return c1, c2

    @property
    def free_slots(self) -> Tuple[Tuple[int, int], ...]:
        """Matrix positions carrying coordinates, row-major over free columns."""
        c1, c2 = self.free_columns
        return ((0, c1), (0, c2), (1, c1), (1, c2))


GENERAL_CHARTS = (ChartId.N12, ChartId.N13, ChartId.N14, ChartId.N23, ChartId.N24, ChartId.N34)
SELF_ADJOINT_CHARTS = (ChartId.O13, ChartId.O14, ChartId.O23, ChartId.O24)

_PIVOTS: Dict[ChartId, Tuple[Tuple[int, int], np.ndarray]] = {
    ChartId.N12: ((0, 1), np.diag([1.0, 1.0]).astype(complex)),
    ChartId.N13: ((0, 2), np.diag([1.0, -1.0]).astype(complex)),
    ChartId.N14: ((0, 3), np.diag([1.0, 1.0]).astype(complex)),
    ChartId.N23: ((1, 2), np.diag([-1.0, -1.0]).astype(complex)),
    ChartId.N24: ((1, 3), np.diag([-1.0, 1.0]).astype(complex)),
    ChartId.N34: ((2, 3), np.diag([-1.0, -1.0]).astype(complex)),
}

# (real slot, z slot, conj(z) slot, real slot) of each self-adjoint chart.
_SA_SLOTS: Dict[ChartId, Tuple[Tuple[int, int], ...]] = {
    ChartId.O13: ((0, 1), (1, 1), (0, 3), (1, 3)),
    ChartId.O14: ((0, 1), (1, 1), (0, 2), (1, 2)),
    ChartId.O23: ((0, 0), (1, 0), (0, 3), (1, 3)),
    ChartId.O24: ((0, 0), (1, 0), (0, 2), (1, 2)),
}

# Relative slack when several minors tie for the largest |det|.
_TIE_SLACK = 1e-8


class BCClass(str, Enum):
    DEGENERATED = "degenerated"
    SEPARATED = "separated"
    COUPLED = "coupled"


# ============================================================================
# Boundary conditions
# ============================================================================

@dataclass(frozen=True, eq=False)
class BoundaryCondition:
    """One representative (A|B) of a boundary condition."""

    A: Mat2
    B: Mat2

    def __post_init__(self) -> None:
        a, b = as_mat2(self.A), as_mat2(self.B)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)

    @classmethod
    def from_matrix(cls, matrix) -> "BoundaryCondition":
        m = np.array(matrix, dtype=complex)
        if m.shape != (2, 4):
            raise SLPError(
                code=ErrorCode.SHAPE_MISMATCH,
                message="boundary matrix must be 2x4",
                details={"shape": list(m.shape)},
            )
        return cls(m[:, :2], m[:, 2:])

    @property
    def matrix(self) -> np.ndarray:
        return np.hstack([self.A, self.B])

    @property
    def scale(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def transformed(self, T) -> "BoundaryCondition":
        t = as_mat2(T)
        return BoundaryCondition(t @ self.A, t @ self.B)

    def rank(self, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
        if self.scale == 0.0:
            return 0
        return numeric_rank(self.matrix, self.scale, tol.rank)

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        """Raises SLPError(NOT_RANK_2) unless rank (A|B) = 2."""
        rank = self.rank(tol)
        if rank != 2:
            raise SLPError(
                code=ErrorCode.NOT_RANK_2,
                message="boundary condition (A|B) must have rank 2",
                details={"rank": rank},
            )

    def residual(self, seq: SolutionSequence) -> np.ndarray:
        """A (y_0, qd_0) + B (y_N, qd_N)."""
        values = seq.boundary_values()
        return self.A @ values[:2] + self.B @ values[2:]

    def __repr__(self) -> str:
        return f"BoundaryCondition({np.array2string(self.matrix, precision=6)})"


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """
    Coordinates of a boundary condition in one chart.

    General charts carry 4 complex coordinates (free entries, row-major over
    the free columns). Self-adjoint charts carry 4 reals
    (real slot, Re z, Im z, real slot).
    """

    chart_id: ChartId
    coords: np.ndarray

    def distance(self, other: "ChartPoint") -> float:
        if self.chart_id != other.chart_id:
            return float("inf")
        return float(np.max(np.abs(np.asarray(self.coords) - np.asarray(other.coords))))


@dataclass(frozen=True)
class SeparatedParams:
    alpha: float
    beta: float


@dataclass(frozen=True, eq=False)
class CoupledParams:
    gamma: float
    K: np.ndarray


@dataclass(frozen=True, eq=False)
class BCTangent:
    """A perturbation (H|L) of a boundary condition inside one chart."""

    chart_id: ChartId
    H: Mat2
    L: Mat2

    def __post_init__(self) -> None:
        object.__setattr__(self, "chart_id", ChartId(self.chart_id))
        object.__setattr__(self, "H", as_mat2(self.H))
        object.__setattr__(self, "L", as_mat2(self.L))

    @property
    def matrix(self) -> np.ndarray:
        return np.hstack([self.H, self.L])

    @classmethod
    def zero(cls, chart_id: ChartId) -> "BCTangent":
        return cls(chart_id, np.zeros((2, 2)), np.zeros((2, 2)))


# ============================================================================
# Charts
# ============================================================================

def _minor_det(matrix: np.ndarray, chart: ChartId) -> complex:
    c1, c2 = chart.pivot_columns
    return complex(matrix[0, c1] * matrix[1, c2] - matrix[0, c2] * matrix[1, c1])


def _best_chart(bc: BoundaryCondition, candidates: Sequence[ChartId]) -> ChartId:
    sizes = [abs(_minor_det(bc.matrix, chart)) for chart in candidates]
    best = max(sizes)
    for chart, size in zip(candidates, sizes):
        if size >= (1.0 - _TIE_SLACK) * best:
            return chart
    return candidates[int(np.argmax(sizes))]


def normalized_matrix(bc: BoundaryCondition, chart_id: ChartId,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Representative of ``bc`` in the normal form of ``chart_id``.

    Raises:
        SLPError: NOT_IN_CHART when the chart's pivot minor is singular.
    """
    chart = ChartId(chart_id)
    m = bc.matrix
    minor = m[:, list(chart.pivot_columns)]
    det = _minor_det(m, chart)
    if abs(det) <= tol.rank * max(bc.scale, 1e-300) ** 2:
        raise SLPError(
            code=ErrorCode.NOT_IN_CHART,
            message=f"boundary condition does not lie in chart {chart.value}",
            details={"chart": chart.value, "minor": abs(det)},
        )
    normalized = chart.pivot_block @ np.linalg.solve(minor, m)
    normalized[:, list(chart.pivot_columns)] = chart.pivot_block
    return normalized


def chart_coordinates(bc: BoundaryCondition, chart_id: ChartId,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> ChartPoint:
    """Coordinates of ``bc`` in a requested chart."""
    chart = ChartId(chart_id)
    m = normalized_matrix(bc, chart, tol)
    if not chart.is_self_adjoint_chart:
        return ChartPoint(chart, np.array([m[slot] for slot in chart.free_slots], dtype=complex))

    real1, z, zbar, real2 = (complex(m[slot]) for slot in _SA_SLOTS[chart])
    slack = 1e-8 * max(1.0, abs(real1), abs(z), abs(real2))
    if abs(real1.imag) > slack or abs(real2.imag) > slack or abs(zbar - z.conjugate()) > slack:
        raise SLPError(
            code=ErrorCode.NOT_SELF_ADJOINT_CHART,
            message=f"boundary condition is not in self-adjoint chart {chart.value}",
            details={"chart": chart.value},
        )
    return ChartPoint(chart, np.array([real1.real, z.real, z.imag, real2.real], dtype=float))


def normalize_to_chart(bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOLERANCES) -> ChartPoint:
    """General chart with the largest pivot minor, and the coordinates there."""
    bc.validate(tol)
    return chart_coordinates(bc, _best_chart(bc, GENERAL_CHARTS), tol)


def self_adjoint_chart(bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOLERANCES) -> ChartPoint:
    """Self-adjoint chart with the largest pivot minor, and the coordinates there."""
    bc.validate(tol)
    if not is_self_adjoint(bc, tol):
        raise SLPError(
            code=ErrorCode.NOT_SELF_ADJOINT,
            message="self-adjoint charts only cover self-adjoint boundary conditions",
        )
    return chart_coordinates(bc, _best_chart(bc, SELF_ADJOINT_CHARTS), tol)


def chart_to_bc(point: ChartPoint) -> BoundaryCondition:
    """Rebuild the normalized representative of a chart point."""
    chart = point.chart_id
    m = np.zeros((2, 4), dtype=complex)
    m[:, list(chart.pivot_columns)] = chart.pivot_block
    coords = np.asarray(point.coords)
    if chart.is_self_adjoint_chart:
        real1, re_z, im_z, real2 = (float(c) for c in coords.real)
        z = complex(re_z, im_z)
        for slot, value in zip(_SA_SLOTS[chart], (real1, z, z.conjugate(), real2)):
            m[slot] = value
    else:
        for slot, value in zip(chart.free_slots, coords):
            m[slot] = value
    return BoundaryCondition.from_matrix(m)


def normalized_bc(bc: BoundaryCondition, chart_id: ChartId,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> BoundaryCondition:
    """Normal-form representative of ``bc`` in ``chart_id``."""
    return chart_to_bc(chart_coordinates(bc, chart_id, tol))


# ============================================================================
# Tangents
# ============================================================================

def tangent_from_coords(chart_id: ChartId, dcoords: Sequence[complex]) -> BCTangent:
    """
    Tangent vector for a coordinate displacement.

    For self-adjoint charts ``dcoords`` is (d real, d Re z, d Im z, d real)
    and the conjugate slot receives conj(dz).
    """
    chart = ChartId(chart_id)
    values = np.asarray(dcoords, dtype=complex)
    if values.shape != (4,):
        raise SLPError(
            code=ErrorCode.CHART_TANGENT_MISMATCH,
            message="a chart displacement has four components",
            details={"chart": chart.value, "length": int(values.size)},
        )
    m = np.zeros((2, 4), dtype=complex)
    if chart.is_self_adjoint_chart:
        d1, dre, dim, d2 = values.real
        dz = complex(dre, dim)
        for slot, value in zip(_SA_SLOTS[chart], (d1, dz, dz.conjugate(), d2)):
            m[slot] = value
    else:
        for slot, value in zip(chart.free_slots, values):
            m[slot] = value
    return BCTangent(chart, m[:, :2], m[:, 2:])


def check_tangent(tangent: BCTangent, atol: float = 1e-12) -> None:
    """
    Raises SLPError(CHART_TANGENT_MISMATCH) when (H|L) leaves the chart's
    free slots or breaks the reality/conjugacy pattern of a self-adjoint chart.
    """
    chart = tangent.chart_id
    m = tangent.matrix
    slack = atol * max(1.0, float(np.max(np.abs(m))))
    mask = np.ones((2, 4), dtype=bool)
    for slot in chart.free_slots:
        mask[slot] = False
    if np.any(np.abs(m[mask]) > slack):
        raise SLPError(
            code=ErrorCode.CHART_TANGENT_MISMATCH,
            message=f"tangent has entries outside the free slots of {chart.value}",
            details={"chart": chart.value},
        )
    if chart.is_self_adjoint_chart:
        real1, z, zbar, real2 = (complex(m[slot]) for slot in _SA_SLOTS[chart])
        if abs(real1.imag) > slack or abs(real2.imag) > slack or abs(zbar - z.conjugate()) > slack:
            raise SLPError(
                code=ErrorCode.CHART_TANGENT_MISMATCH,
                message=f"tangent breaks the self-adjoint pattern of {chart.value}",
                details={"chart": chart.value},
            )


def self_adjoint_slots(chart_id: ChartId) -> Tuple[Tuple[int, int], ...]:
    """(real, z, conj z, real) matrix positions of a self-adjoint chart."""
    chart = ChartId(chart_id)
    if not chart.is_self_adjoint_chart:
        raise SLPError(
            code=ErrorCode.NOT_SELF_ADJOINT_CHART,
            message=f"{chart.value} is not a self-adjoint chart",
            details={"chart": chart.value},
        )
    return _SA_SLOTS[chart]


# ============================================================================
# Self-adjointness and classification
# ============================================================================

def is_self_adjoint(bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    a, b = bc.A, bc.B
    gap = a @ E @ a.conj().T - b @ E @ b.conj().T
    bound = tol.self_adjoint * (np.linalg.norm(a) ** 2 + np.linalg.norm(b) ** 2)
    return bool(np.linalg.norm(gap) <= bound)


def classify(bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOLERANCES) -> BCClass:
    """Degenerated, separated or coupled (rank tests on the two blocks)."""
    bc.validate(tol)
    rank_a = numeric_rank(bc.A, bc.scale, tol.rank)
    rank_b = numeric_rank(bc.B, bc.scale, tol.rank)
    if rank_a == 0 or rank_b == 0:
        return BCClass.DEGENERATED
    if rank_a <= 1 and rank_b <= 1:
        return BCClass.SEPARATED
    return BCClass.COUPLED


# ============================================================================
# Canonical forms
# ============================================================================

def separated_bc(alpha: float, beta: float) -> BoundaryCondition:
    """S_{alpha,beta} without range checks (families sweep past the ends)."""
    a = np.array([[np.cos(alpha), -np.sin(alpha)], [0.0, 0.0]])
    b = np.array([[0.0, 0.0], [np.cos(beta), -np.sin(beta)]])
    return BoundaryCondition(a, b)


def coupled_bc(gamma: float, K) -> BoundaryCondition:
    """[e^{i gamma} K | -I] without range checks."""
    k = np.asarray(K, dtype=float)
    return BoundaryCondition(np.exp(1j * gamma) * k, -_I2)


def canonical_bc(params) -> BoundaryCondition:
    """
    Canonical self-adjoint representative.

    Raises:
        SLPError: PARAM_OUT_OF_RANGE for alpha outside [0, pi), beta outside
        (0, pi], gamma outside [0, pi), or K not real with det K = 1.
    """
    if isinstance(params, SeparatedParams):
        if not (0.0 <= params.alpha < np.pi and 0.0 < params.beta <= np.pi):
            raise SLPError(
                code=ErrorCode.PARAM_OUT_OF_RANGE,
                message="separated parameters need alpha in [0, pi) and beta in (0, pi]",
                details={"alpha": params.alpha, "beta": params.beta},
            )
        return separated_bc(params.alpha, params.beta)

    if isinstance(params, CoupledParams):
        k = np.asarray(params.K)
        if not 0.0 <= params.gamma < np.pi:
            raise SLPError(
                code=ErrorCode.PARAM_OUT_OF_RANGE,
                message="coupled parameter gamma must lie in [0, pi)",
                details={"gamma": params.gamma},
            )
        if k.shape != (2, 2) or np.any(np.abs(np.imag(k)) > 0):
            raise SLPError(
                code=ErrorCode.PARAM_OUT_OF_RANGE,
                message="K must be a real 2x2 matrix",
            )
        det = float(np.linalg.det(np.real(k)))
        if abs(det - 1.0) > 1e-10:
            raise SLPError(
                code=ErrorCode.PARAM_OUT_OF_RANGE,
                message="K must have determinant 1",
                details={"det": det},
            )
        return coupled_bc(params.gamma, np.real(k))

    raise SLPError(
        code=ErrorCode.PARAM_OUT_OF_RANGE,
        message=f"unsupported canonical parameters: {type(params).__name__}",
    )


def _left_null(block: Mat2) -> np.ndarray:
    """Row vector x with x @ block = 0 for a rank-1 block."""
    j = int(np.argmax(np.abs(block[0]) + np.abs(block[1])))
    return np.array([block[1, j], -block[0, j]], dtype=complex)


def _row_angle(row: np.ndarray) -> float:
    """theta with row proportional to (cos theta, -sin theta), in [0, pi)."""
    k = int(np.argmax(np.abs(row)))
    unit = row * (abs(row[k]) / row[k])
    unit = np.real(unit) / np.linalg.norm(unit)
    angle = float(np.mod(np.arctan2(-unit[1], unit[0]), np.pi))
    if angle < 1e-12 or angle > np.pi - 1e-12:
        angle = 0.0
    return angle


def separated_params(bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOLERANCES) -> SeparatedParams:
    """(alpha, beta) of a separated self-adjoint boundary condition."""
    if classify(bc, tol) is not BCClass.SEPARATED or not is_self_adjoint(bc, tol):
        raise SLPError(
            code=ErrorCode.NOT_SEPARATED_SELF_ADJOINT,
            message="boundary condition is not separated and self-adjoint",
        )
    a_row = _left_null(bc.B) @ bc.A
    b_row = _left_null(bc.A) @ bc.B
    alpha = _row_angle(a_row)
    beta = _row_angle(b_row)
    if beta == 0.0:
        beta = float(np.pi)
    return SeparatedParams(alpha, beta)


def coupled_params(bc: BoundaryCondition, tol: Tolerances = DEFAULT_TOLERANCES) -> CoupledParams:
    """(gamma, K) of a coupled self-adjoint boundary condition."""
    if classify(bc, tol) is not BCClass.COUPLED or not is_self_adjoint(bc, tol):
        raise SLPError(
            code=ErrorCode.NOT_SELF_ADJOINT,
            message="boundary condition is not coupled and self-adjoint",
        )
    a_prime = -np.linalg.solve(bc.B, bc.A)
    gamma = float(np.mod(np.angle(np.linalg.det(a_prime)) / 2.0, np.pi))
    if gamma > np.pi - 1e-12:
        gamma = 0.0
    k = np.real(np.exp(-1j * gamma) * a_prime)
    return CoupledParams(gamma, k)


def double_eigenvalue_bc(ts, lam: complex) -> BoundaryCondition:
    """[Phi_N(lam) | -I], the only condition with a 2-dimensional eigenspace at lam."""
    return BoundaryCondition(ts.evaluate(lam), -_I2)
