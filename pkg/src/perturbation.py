"""
Eigenvalue branches over one-parameter problem families and the derivative
formulas of eigenvalues with respect to the boundary condition and the
equation coefficients.

A :class:`ProblemFamily` maps a real parameter t to a problem (eq(t), bc(t)).
Branches are traced by solving the full spectrum on a parameter grid and
matching eigenvalues between consecutive points. A match is accepted only when
the discs around the tracked values contain exactly as many eigenvalues as are
tracked; otherwise the step is halved.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.bc_space import (
    BCTangent,
    BoundaryCondition,
    ChartId,
    ChartPoint,
    chart_coordinates,
    chart_to_bc,
    check_tangent,
    coupled_bc,
    coupled_params,
    normalized_matrix,
    self_adjoint_slots,
    separated_bc,
    separated_params,
)
from src.logging_config import LogContext, get_logger
from src.models import ErrorCode, SLPError
from src.slp_core import (
    DEFAULT_TOLERANCES,
    Mat2,
    SLEquation,
    SolutionSequence,
    Tolerances,
    cofactor,
    validate_equation,
)
from src.spectrum import (
    SpectrumReport,
    characteristic_polynomial,
    eigenfunction,
    eigenvalues,
    is_self_adjoint_problem,
    require_eigenvalue,
    simple_slope,
)
from src.transfer import transfer_for

logger = get_logger(__name__)


class FamilyTarget(str, Enum):
    BC_CHART_COORD = "bc_chart_coord"
    BC_TANGENT = "bc_tangent"
    SEPARATED_ALPHA = "separated_alpha"
    SEPARATED_BETA = "separated_beta"
    COUPLED_GAMMA = "coupled_gamma"
    EQ_INV_F = "eq_inv_f"
    EQ_F = "eq_f"
    EQ_Q = "eq_q"
    EQ_W = "eq_w"
    EQ_TANGENT = "eq_tangent"

    @property
    def moves_equation(self) -> bool:
        return self.value.startswith("eq_")


class Expectation(str, Enum):
    STRICT_DECREASING = "strict_decreasing"
    STRICT_INCREASING = "strict_increasing"
    NONDECREASING = "nondecreasing"
    NONINCREASING = "nonincreasing"
    SIGN_SPLIT_BY_ZERO = "sign_split_by_zero"


@dataclass(frozen=True, eq=False)
class EquationTangent:
    """Perturbation (h, k, l) of (1/f_0..1/f_N, q_1..q_N, w_1..w_N)."""

    h: np.ndarray
    k: np.ndarray
    l: np.ndarray

    def __post_init__(self) -> None:
        h, k, l = (np.asarray(v, dtype=float) for v in (self.h, self.k, self.l))
        if k.size != l.size or h.size != k.size + 1:
            raise SLPError(
                code=ErrorCode.SHAPE_MISMATCH,
                message="h must have N+1 entries and k, l must have N entries",
                details={"len_h": int(h.size), "len_k": int(k.size), "len_l": int(l.size)},
            )
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        return int(self.k.size)

    @classmethod
    def zero(cls, n: int) -> "EquationTangent":
        return cls(np.zeros(n + 1), np.zeros(n), np.zeros(n))

    @classmethod
    def unit(cls, n: int, component: str, index: int) -> "EquationTangent":
        """Tangent with a single 1 in h (index 0..N), k or l (index 1..N)."""
        tangent = {"h": np.zeros(n + 1), "k": np.zeros(n), "l": np.zeros(n)}
        offset = 0 if component == "h" else 1
        tangent[component][index - offset] = 1.0
        return cls(**tangent)


Direction = Union[BCTangent, EquationTangent, None]


def _invalid(param: float, message: str, **details) -> SLPError:
    return SLPError(
        code=ErrorCode.INVALID_GRID_POINT,
        message=f"invalid problem at parameter {param:.17g}: {message}",
        details={"param": param, **details},
    )


@dataclass(frozen=True, eq=False)
class ProblemFamily:
    """
    One-parameter family of problems.

    Scalar targets set the named quantity equal to t: a chart coordinate
    (``chart``, ``index``), an angle of the canonical separated or coupled
    form, or one coefficient f_n, 1/f_n, q_n, w_n (``index`` is 0-based for
    f and 1-based for q and w). ``bc_tangent`` and ``eq_tangent`` move the
    base along ``direction``.
    """

    base_eq: SLEquation
    base_bc: BoundaryCondition
    target: FamilyTarget
    param_range: Tuple[float, float]
    steps: int
    index: Optional[int] = None
    chart: Optional[ChartId] = None
    direction: Direction = None
    _anchor: Dict[str, object] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", FamilyTarget(self.target))
        if self.chart is not None:
            object.__setattr__(self, "chart", ChartId(self.chart))
        lo, hi = (float(v) for v in self.param_range)
        object.__setattr__(self, "param_range", (lo, hi))
        if self.steps < 2:
            raise SLPError(
                code=ErrorCode.PARAM_OUT_OF_RANGE,
                message="a family needs at least 2 grid points",
                details={"steps": self.steps},
            )
        self._anchor.update(self._resolve_anchor())

    def _require_index(self, lo: int, hi: int) -> int:
        if self.index is None or not lo <= self.index <= hi:
            raise SLPError(
                code=ErrorCode.PARAM_OUT_OF_RANGE,
                message=f"target {self.target.value} needs an index in [{lo}, {hi}]",
                details={"index": self.index},
            )
        return int(self.index)

    def _resolve_anchor(self) -> Dict[str, object]:
        """Precompute what stays fixed along the family."""
        target, n_max = self.target, self.base_eq.N
        if target is FamilyTarget.BC_CHART_COORD:
            if self.chart is None:
                raise SLPError(code=ErrorCode.PARAM_OUT_OF_RANGE,
                               message="bc_chart_coord needs a chart")
            self._require_index(0, 3)
            return {"point": chart_coordinates(self.base_bc, self.chart)}
        if target is FamilyTarget.BC_TANGENT:
            if not isinstance(self.direction, BCTangent):
                raise SLPError(code=ErrorCode.CHART_TANGENT_MISMATCH,
                               message="bc_tangent needs a BCTangent direction")
            check_tangent(self.direction)
            chart = self.direction.chart_id
            if chart.is_self_adjoint_chart:
                chart_coordinates(self.base_bc, chart)
            return {"matrix": normalized_matrix(self.base_bc, chart.general_chart)}
        if target in (FamilyTarget.SEPARATED_ALPHA, FamilyTarget.SEPARATED_BETA):
            return {"params": separated_params(self.base_bc)}
        if target is FamilyTarget.COUPLED_GAMMA:
            return {"params": coupled_params(self.base_bc)}
        if target in (FamilyTarget.EQ_INV_F, FamilyTarget.EQ_F):
            self._require_index(0, n_max)
        elif target in (FamilyTarget.EQ_Q, FamilyTarget.EQ_W):
            self._require_index(1, n_max)
        elif target is FamilyTarget.EQ_TANGENT:
            if not isinstance(self.direction, EquationTangent) or self.direction.N != n_max:
                raise SLPError(code=ErrorCode.SHAPE_MISMATCH,
                               message="eq_tangent needs an EquationTangent of matching N")
        return {}

    def grid(self) -> np.ndarray:
        """Parameter grid in marching order (descending for a reversed range)."""
        lo, hi = self.param_range
        return np.linspace(lo, hi, self.steps)

    def _bc_at(self, t: float) -> BoundaryCondition:
        target = self.target
        if target is FamilyTarget.BC_CHART_COORD:
            point = self._anchor["point"]
            coords = np.array(point.coords, copy=True)
            coords[self.index] = t
            return chart_to_bc(ChartPoint(point.chart_id, coords))
        if target is FamilyTarget.BC_TANGENT:
            m = self._anchor["matrix"] + t * self.direction.matrix
            return BoundaryCondition.from_matrix(m)
        if target is FamilyTarget.SEPARATED_ALPHA:
            return separated_bc(t, self._anchor["params"].beta)
        if target is FamilyTarget.SEPARATED_BETA:
            return separated_bc(self._anchor["params"].alpha, t)
        if target is FamilyTarget.COUPLED_GAMMA:
            return coupled_bc(t, self._anchor["params"].K)
        return self.base_bc

    def _eq_at(self, t: float) -> SLEquation:
        eq, target = self.base_eq, self.target
        if not target.moves_equation:
            return eq
        f, q, w = np.array(eq.f), np.array(eq.q), np.array(eq.w)
        if target is FamilyTarget.EQ_F:
            if t == 0:
                raise _invalid(t, "f_n must be nonzero")
            f[self.index] = t
            return eq.with_coefficients(f, q, w)
        inv_f = 1.0 / f
        if target is FamilyTarget.EQ_INV_F:
            inv_f[self.index] = t
        elif target is FamilyTarget.EQ_Q:
            q[self.index - 1] = t
        elif target is FamilyTarget.EQ_W:
            w[self.index - 1] = t
        elif target is FamilyTarget.EQ_TANGENT:
            inv_f = inv_f + t * self.direction.h
            q = q + t * self.direction.k
            w = w + t * self.direction.l
        if np.any(inv_f == 0) or not np.all(np.isfinite(inv_f)):
            raise _invalid(t, "f_n must be finite and nonzero")
        f = 1.0 / inv_f
        return eq.with_coefficients(f, q, w)

    def problem_at(self, t: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[SLEquation, BoundaryCondition]:
        """
        Problem at parameter t.

        Raises:
            SLPError: INVALID_GRID_POINT if the problem there is not valid.
        """
        t = float(t)
        eq, bc = self._eq_at(t), self._bc_at(t)
        report = validate_equation(eq)
        if not report.ok:
            raise _invalid(t, str(report), violations=[str(v) for v in report.violations])
        if bc.rank(tol) != 2:
            raise _invalid(t, "boundary condition is not of rank 2")
        return eq, bc

    @property
    def base_param(self) -> float:
        return float(self.param_range[0])


# ============================================================================
# Branches
# ============================================================================

@dataclass(frozen=True)
class BranchSample:
    param: float
    lam: complex
    analytic_mult: int
    geometric_mult: int


@dataclass
class Branch:
    """Samples in marching order; ``continuity_radius[i]`` bounds step i -> i+1."""

    branch_id: int
    samples: List[BranchSample] = field(default_factory=list)
    continuity_radius: List[float] = field(default_factory=list)

    def params(self) -> np.ndarray:
        return np.array([s.param for s in self.samples])

    def values(self) -> np.ndarray:
        return np.array([s.lam for s in self.samples], dtype=complex)

    def max_jump(self) -> float:
        values = self.values()
        if values.size < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(values))))

    def to_dict(self) -> dict:
        return {
            "branch_id": self.branch_id,
            "samples": [
                {"param": s.param, "re": s.lam.real, "im": s.lam.imag,
                 "analytic_mult": s.analytic_mult, "geometric_mult": s.geometric_mult}
                for s in self.samples
            ],
        }


@dataclass(frozen=True)
class _Point:
    param: float
    values: Tuple[complex, ...]
    report: SpectrumReport


def _spectrum_at(family: ProblemFamily, t: float, tol: Tolerances) -> SpectrumReport:
    eq, bc = family.problem_at(t, tol)
    return eigenvalues(eq, bc, tol)


def evaluate_grid(family: ProblemFamily, grid: Sequence[float], tol: Tolerances = DEFAULT_TOLERANCES,
                  workers: int = 1) -> List[SpectrumReport]:
    """Spectra at every grid point, in grid order."""
    if workers <= 1:
        return [_spectrum_at(family, t, tol) for t in grid]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda t: _spectrum_at(family, t, tol), grid))


def _remove_nearest(pool: List[complex], values: Sequence[complex]) -> List[complex]:
    rest = list(pool)
    for value in values:
        if rest:
            rest.pop(int(np.argmin([abs(value - r) for r in rest])))
    return rest


def _radii(tracked: Sequence[complex], report: SpectrumReport) -> List[float]:
    """Half the gap to untracked eigenvalues, capped at half the magnitude scale."""
    others = _remove_nearest(report.values(expanded=True), tracked)
    radii = []
    for value in tracked:
        gap = min((abs(value - o) for o in others), default=math.inf)
        radii.append(min(0.5 * gap, 0.5 * max(1.0, abs(value))))
    return radii


def _ordered(values: Sequence[complex]) -> List[complex]:
    return sorted(values, key=lambda v: (v.real, v.imag))


def _match(prev: _Point, report: SpectrumReport) -> Optional[Tuple[List[complex], List[float]]]:
    """New tracked values in tracked order, or None when the count gate fails."""
    tracked = list(prev.values)
    radii = _radii(tracked, prev.report)
    candidates = report.values(expanded=True)
    inside = [c for c in candidates
              if any(abs(c - v) <= r for v, r in zip(tracked, radii))]
    if len(inside) != len(tracked):
        return None

    if prev.report.self_adjoint and report.self_adjoint:
        matched = _ordered(inside)
    else:
        cost = np.array([[abs(v - c) for c in inside] for v in tracked])
        rows, cols = linear_sum_assignment(cost)
        matched = [inside[c] for _, c in sorted(zip(rows, cols))]
    if any(abs(m - v) > r for m, v, r in zip(matched, tracked, radii)):
        return None
    return matched, radii


class _Tracer:
    """Grouped continuation along one family."""

    def __init__(self, family: ProblemFamily, tol: Tolerances):
        self.family = family
        self.tol = tol

    def step(self, prev: _Point, param: float, report: SpectrumReport, depth: int) -> List[Tuple[_Point, List[float]]]:
        matched = _match(prev, report)
        if matched is not None:
            values, radii = matched
            return [(_Point(param, tuple(values), report), radii)]
        if depth >= self.tol.refinement_cap:
            raise SLPError(
                code=ErrorCode.MATCH_AMBIGUITY,
                message=f"eigenvalue matching stayed ambiguous near parameter {param:.17g}",
                details={"param": param, "depth": depth},
            )
        mid = 0.5 * (prev.param + param)
        logger.debug(f"Refining step {prev.param:.6g} -> {param:.6g}", extra={"param": mid})
        mid_report = _spectrum_at(self.family, mid, self.tol)
        first = self.step(prev, mid, mid_report, depth + 1)
        return first + self.step(first[-1][0], param, report, depth + 1)


def _sample(point: _Point, value: complex) -> BranchSample:
    nearest = point.report.nearest(value)
    return BranchSample(point.param, value, nearest.analytic_mult, nearest.geometric_mult)


def _start_values(report: SpectrumReport, starts: Sequence[complex]) -> List[complex]:
    """Snap requested start values onto the computed spectrum."""
    candidates = report.values(expanded=True)
    if len(candidates) < len(starts):
        raise SLPError(
            code=ErrorCode.NOT_AN_EIGENVALUE,
            message="more start values than eigenvalues of the initial problem",
            details={"starts": len(starts), "eigenvalues": len(candidates)},
        )
    cost = np.array([[abs(s - c) for c in candidates] for s in starts])
    rows, cols = linear_sum_assignment(cost)
    snapped = [candidates[c] for _, c in sorted(zip(rows, cols))]
    if report.self_adjoint:
        snapped = _ordered(snapped)
    return snapped


def branch_trace_group(
    family: ProblemFamily,
    starts: Sequence[complex],
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
) -> List[Branch]:
    """
    Trace several eigenvalues of the family jointly.

    ``starts`` are eigenvalues of the problem at the first grid point (repeat
    a value to follow both branches through a double eigenvalue). For
    self-adjoint problems the tracked values are kept in ascending order, so
    branch 0 is always the lower one.

    Raises:
        SLPError: NOT_AN_EIGENVALUE for a bad start, INVALID_GRID_POINT, or
        MATCH_AMBIGUITY (partial branches in ``details["branches"]``).
    """
    grid = family.grid()
    with LogContext(logger, "Tracing eigenvalue branches", n_points=len(grid), param=float(grid[0])):
        reports = evaluate_grid(family, grid, tol, workers)
        eq0, bc0 = family.problem_at(grid[0], tol)
        char_poly = characteristic_polynomial(eq0, bc0, tol)
        for value in starts:
            require_eigenvalue(char_poly, complex(value), tol)

        first = _Point(float(grid[0]), tuple(_start_values(reports[0], starts)), reports[0])
        branches = [Branch(i) for i in range(len(starts))]
        for branch, value in zip(branches, first.values):
            branch.samples.append(_sample(first, value))

        tracer = _Tracer(family, tol)
        prev = first
        for param, report in zip(grid[1:], reports[1:]):
            try:
                accepted = tracer.step(prev, float(param), report, 0)
            except SLPError as exc:
                if exc.code is ErrorCode.MATCH_AMBIGUITY:
                    exc.details["branches"] = branches
                raise
            for point, radii in accepted:
                for branch, value, radius in zip(branches, point.values, radii):
                    branch.samples.append(_sample(point, value))
                    branch.continuity_radius.append(radius)
                prev = point
    return branches


def branch_trace(
    family: ProblemFamily,
    lambda_start: complex,
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
) -> List[Branch]:
    """Branch through lambda_start, or the ordered pair through a double eigenvalue."""
    eq0, bc0 = family.problem_at(family.grid()[0], tol)
    report = eigenvalues(eq0, bc0, tol)
    require_eigenvalue(report.char_poly, complex(lambda_start), tol)
    mult = report.nearest(complex(lambda_start)).analytic_mult
    return branch_trace_group(family, [complex(lambda_start)] * mult, tol, workers)


# ============================================================================
# Derivative formulas
# ============================================================================

@dataclass(frozen=True, eq=False)
class BCDerivativeKernel:
    """Coefficients of dGamma with respect to the entries of A (D) and B (E)."""

    D: Mat2
    E: Mat2


def bc_derivative_kernel(bc: BoundaryCondition, phi: Mat2) -> BCDerivativeKernel:
    """D = cof(A) + cof(B) cof(Phi_N), E = cof(B) + cof(A) Phi_N^T."""
    a_cof, b_cof = cofactor(bc.A), cofactor(bc.B)
    return BCDerivativeKernel(a_cof + b_cof @ cofactor(phi), b_cof + a_cof @ phi.T)


def bc_derivative(
    eq: SLEquation,
    bc: BoundaryCondition,
    lambda_star: complex,
    tangent: BCTangent,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> complex:
    """
    Derivative of the simple eigenvalue lambda_star along (H|L).

    The tangent lives in ``tangent.chart_id``; ``bc`` is first brought to that
    chart's normal form.

    Raises:
        SLPError: NOT_SIMPLE, CHART_TANGENT_MISMATCH, NOT_IN_CHART.
    """
    check_tangent(tangent)
    chart = tangent.chart_id
    if chart.is_self_adjoint_chart:
        chart_coordinates(bc, chart, tol)
    normal = BoundaryCondition.from_matrix(normalized_matrix(bc, chart.general_chart, tol))
    ts = transfer_for(eq)
    slope = simple_slope(characteristic_polynomial(eq, normal, tol, ts), lambda_star, tol)
    kernel = bc_derivative_kernel(normal, ts.evaluate(lambda_star))
    total = np.sum(kernel.D * tangent.H) + np.sum(kernel.E * tangent.L)
    return complex(-total / slope)


def _normalized_eigenfunction(eq: SLEquation, bc: BoundaryCondition, lam: complex,
                              tol: Tolerances, code: ErrorCode) -> SolutionSequence:
    if not is_self_adjoint_problem(eq, bc, tol):
        raise SLPError(
            code=code,
            message="formula needs a real positive-weight equation and a self-adjoint condition",
        )
    simple_slope(characteristic_polynomial(eq, bc, tol), lam, tol)
    return eigenfunction(eq, bc, lam, tol).seq


def separated_derivatives(
    eq: SLEquation,
    bc: BoundaryCondition,
    lambda_star: complex,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[float, float]:
    """
    (d/dalpha, d/dbeta) of the eigenvalue for S_{alpha,beta}:
    (-|y_0|^2 - |f_0 Delta y_0|^2, |y_N|^2 + |f_N Delta y_N|^2).
    """
    separated_params(bc, tol)
    y = _normalized_eigenfunction(eq, bc, lambda_star, tol, ErrorCode.NOT_SEPARATED_SELF_ADJOINT)
    y0, qd0, yn, qdn = np.abs(y.boundary_values()) ** 2
    return float(-y0 - qd0), float(yn + qdn)


# Boundary values entering the quadratic form of each self-adjoint chart,
# as positions in (y_0, qd_0, y_N, qd_N).
_FORM_VECTORS = {
    ChartId.O13: (1, 3),
    ChartId.O14: (1, 2),
    ChartId.O23: (0, 3),
    ChartId.O24: (0, 2),
}


def self_adjoint_bc_derivative(
    eq: SLEquation,
    bc: BoundaryCondition,
    lambda_star: complex,
    tangent: BCTangent,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Hermitian form v* [[h_1, conj(h_z)], [h_z, h_2]] v of the normalized
    eigenfunction, with v the pair of boundary values paired with the chart.

    Raises:
        SLPError: NOT_SELF_ADJOINT_CHART, CHART_TANGENT_MISMATCH, NOT_SIMPLE,
        NOT_SELF_ADJOINT.
    """
    chart = tangent.chart_id
    slots = self_adjoint_slots(chart)
    check_tangent(tangent)
    chart_coordinates(bc, chart, tol)
    y = _normalized_eigenfunction(eq, bc, lambda_star, tol, ErrorCode.NOT_SELF_ADJOINT)

    m = tangent.matrix
    h1, hz, h2 = m[slots[0]].real, complex(m[slots[1]]), m[slots[3]].real
    form = np.array([[h1, np.conj(hz)], [hz, h2]], dtype=complex)
    v = y.boundary_values()[list(_FORM_VECTORS[chart])]
    return float(np.real(np.conj(v) @ form @ v))


def equation_derivative(
    eq: SLEquation,
    bc: BoundaryCondition,
    lambda_star: complex,
    tangent: EquationTangent,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    -sum_{n<N} |f_n Delta y_n|^2 h_n + sum |y_n|^2 k_n - lambda sum |y_n|^2 l_n.

    The h-sum stops at N - 1, so the value never depends on h_N.
    """
    if tangent.N != eq.N:
        raise SLPError(
            code=ErrorCode.SHAPE_MISMATCH,
            message="tangent and equation sizes differ",
            details={"tangent_N": tangent.N, "N": eq.N},
        )
    y = _normalized_eigenfunction(eq, bc, lambda_star, tol, ErrorCode.NOT_SELF_ADJOINT)
    n_max = eq.N
    qd2 = np.abs(y.qd[:n_max]) ** 2
    y2 = np.abs(y.y[1 : n_max + 1]) ** 2
    lam = complex(lambda_star).real
    return float(-np.dot(qd2, tangent.h[:n_max]) + np.dot(y2, tangent.k) - lam * np.dot(y2, tangent.l))


@dataclass(frozen=True)
class LagrangeForms:
    left: complex
    right: complex

    @property
    def gap(self) -> float:
        return abs(self.left - self.right)


def lagrange_form(u: SolutionSequence, v: SolutionSequence) -> LagrangeForms:
    """u conj(f Delta v) - (f Delta u) conj(v) at n = 0 and at n = N."""
    ub, vb = u.boundary_values(), v.boundary_values()
    left = ub[0] * np.conj(vb[1]) - ub[1] * np.conj(vb[0])
    right = ub[2] * np.conj(vb[3]) - ub[3] * np.conj(vb[2])
    return LagrangeForms(complex(left), complex(right))


# ============================================================================
# Audits and finite differences
# ============================================================================

@dataclass(frozen=True)
class AuditFinding:
    param_from: float
    param_to: float
    lam_from: float
    lam_to: float
    reason: str


@dataclass(frozen=True)
class AuditReport:
    expectation: Expectation
    findings: Tuple[AuditFinding, ...]

    @property
    def passed(self) -> bool:
        return not self.findings


_STRICT_SLACK = 1e-12
_NONSTRICT_SLACK = 1e-9


def _violates(expectation: Expectation, a: float, b: float) -> Optional[str]:
    diff = b - a
    scale = max(1.0, abs(a), abs(b))
    if expectation is Expectation.STRICT_DECREASING and not diff < -_STRICT_SLACK * scale:
        return "not strictly decreasing"
    if expectation is Expectation.STRICT_INCREASING and not diff > _STRICT_SLACK * scale:
        return "not strictly increasing"
    if expectation is Expectation.NONINCREASING and diff > _NONSTRICT_SLACK * scale:
        return "increases"
    if expectation is Expectation.NONDECREASING and diff < -_NONSTRICT_SLACK * scale:
        return "decreases"
    return None


def monotonicity_audit(branch: Branch, expectation: Union[Expectation, str]) -> AuditReport:
    """Check consecutive samples (in parameter order) against an expectation."""
    expectation = Expectation(expectation)
    samples = sorted(branch.samples, key=lambda s: s.param)
    findings = []
    for s in samples:
        if abs(s.lam.imag) > 1e-7 * max(1.0, abs(s.lam)):
            findings.append(AuditFinding(s.param, s.param, s.lam.real, s.lam.real, "non-real sample"))

    for prev, curr in zip(samples, samples[1:]):
        a, b = prev.lam.real, curr.lam.real
        mode = expectation
        if expectation is Expectation.SIGN_SPLIT_BY_ZERO:
            if a > 0 and b > 0:
                mode = Expectation.NONINCREASING
            elif a < 0 and b < 0:
                mode = Expectation.NONDECREASING
            else:
                continue
        reason = _violates(mode, a, b)
        if reason:
            findings.append(AuditFinding(prev.param, curr.param, a, b, reason))
    return AuditReport(expectation, tuple(findings))


def _nearest_value(family: ProblemFamily, t: float, lam: complex, tol: Tolerances) -> complex:
    return _spectrum_at(family, t, tol).nearest(lam).value


def finite_difference(
    family: ProblemFamily,
    t0: float,
    lambda_star: complex,
    h: Optional[float] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> complex:
    """
    Central difference of the eigenvalue branch through lambda_star at t0.

    When another eigenvalue lies within 1e-3 the step shrinks below the gap
    and a Richardson combination of two central differences is returned.
    """
    h = 1e-6 * max(1.0, abs(t0)) if h is None else h
    report = _spectrum_at(family, t0, tol)
    others = _remove_nearest(report.values(expanded=True), [lambda_star])
    gap = min((abs(lambda_star - o) for o in others), default=math.inf)

    def central(step: float) -> complex:
        up = _nearest_value(family, t0 + step, lambda_star, tol)
        down = _nearest_value(family, t0 - step, lambda_star, tol)
        return (up - down) / (2.0 * step)

    if gap >= 1e-3:
        return central(h)
    h = min(h, 1e-3 * gap)
    logger.debug(f"Richardson difference at t={t0:.6g}, gap={gap:.3g}")
    return (4.0 * central(h / 2.0) - central(h)) / 3.0
