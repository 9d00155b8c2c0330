"""
Spectra of discrete Sturm-Liouville problems.

The eigenvalues of (eq, bc) are the zeros of the characteristic polynomial

    Gamma(lam) = det(A + B Phi_N(lam)),

cross-checked against the cofactor expansion
det A + det B + sum_ij c_ij Phi_N[i, j] with C = B^T cof(A). Roots come from
the companion matrix (``numpy.polynomial.polynomial.polyroots``), are grouped
into clusters that define the analytic multiplicity and polished with Newton
steps when simple. Geometric multiplicities come from the rank of
A + B Phi_N(lam).

An independent oracle expands the determinant of the (N+2)x(N+2) linear pencil
in the unknowns y_0..y_{N+1} by elimination with constant pivots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.optimize import linear_sum_assignment

from src.bc_space import BoundaryCondition, is_self_adjoint
from src.logging_config import get_logger, log_performance
from src.models import ErrorCode, SLPError
from src.slp_core import (
    DEFAULT_TOLERANCES,
    ComplexPolynomial,
    SLEquation,
    SolutionSequence,
    Tolerances,
    cofactor,
    mat2_rank,
    numeric_rank,
)
from src.transfer import TransferSystem, solve_ivp, transfer_for

logger = get_logger(__name__)

# Largest N the pencil oracle accepts.
ORACLE_MAX_N = 12


class SpectrumKind(str, Enum):
    FINITE = "finite"
    WHOLE_PLANE = "whole_plane"


@dataclass(frozen=True, eq=False)
class CharacteristicPolynomial:
    """Gamma computed two ways plus a magnitude reference."""

    gamma: ComplexPolynomial
    via_expansion: ComplexPolynomial
    scale: float

    def is_whole_plane(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return self.gamma.max_abs <= tol.whole_plane * self.scale

    def degree(self, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
        return self.gamma.numeric_degree(tol.degree)


@dataclass(frozen=True)
class Eigenvalue:
    value: complex
    analytic_mult: int
    geometric_mult: int
    certified: bool = True

    def to_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "analytic_mult": self.analytic_mult,
            "geometric_mult": self.geometric_mult,
            "certified": self.certified,
        }


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Eigenvalues sorted by (real part, imaginary part)."""

    kind: SpectrumKind
    eigenvalues: Tuple[Eigenvalue, ...]
    char_poly: CharacteristicPolynomial
    self_adjoint: bool = False
    converged: bool = True

    @property
    def total_multiplicity(self) -> int:
        return sum(e.analytic_mult for e in self.eigenvalues)

    def values(self, expanded: bool = False) -> List[complex]:
        """Eigenvalues, each repeated analytic_mult times when ``expanded``."""
        if expanded:
            return [e.value for e in self.eigenvalues for _ in range(e.analytic_mult)]
        return [e.value for e in self.eigenvalues]

    def nearest(self, lam: complex) -> Eigenvalue:
        if not self.eigenvalues:
            raise SLPError(
                code=ErrorCode.NOT_AN_EIGENVALUE,
                message="the problem has no finite eigenvalues",
                details={"lambda": [complex(lam).real, complex(lam).imag]},
            )
        return min(self.eigenvalues, key=lambda e: abs(e.value - lam))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "self_adjoint": self.self_adjoint,
            "converged": self.converged,
            "eigenvalues": [e.to_dict() for e in self.eigenvalues],
            "char_poly": [[c.real, c.imag] for c in self.char_poly.gamma.coeffs],
        }


@dataclass(frozen=True)
class SelfAdjointCount:
    r: int
    kappa: complex
    expected_total: int


@dataclass(frozen=True, eq=False)
class EigenfunctionData:
    lam: complex
    c1: complex
    c2: complex
    seq: SolutionSequence
    normalized: bool


@dataclass(frozen=True)
class OracleComparison:
    coefficient_error: float
    root_error: float

    def within(self, tolerance: float) -> bool:
        return self.coefficient_error <= tolerance and self.root_error <= tolerance


# ============================================================================
# Characteristic polynomial
# ============================================================================

def _boundary_matrix_polynomials(ts: TransferSystem, bc: BoundaryCondition):
    """Entries of A + B Phi_N as polynomials."""
    phi = ts.polynomial_matrix()
    return [
        [bc.B[i, 0] * phi[0][j] + bc.B[i, 1] * phi[1][j] + bc.A[i, j] for j in range(2)]
        for i in range(2)
    ]


def characteristic_polynomial(
    eq: SLEquation,
    bc: BoundaryCondition,
    tol: Tolerances = DEFAULT_TOLERANCES,
    ts: Optional[TransferSystem] = None,
) -> CharacteristicPolynomial:
    """
    Gamma = det(A + B Phi_N) and its cofactor expansion.

    Both are cut to degree N, the exact degree bound; the products above it
    only carry rounding. ``gamma`` is further trimmed to its numeric degree.

    Raises:
        SLPError: FORMULA_MISMATCH if the two computations disagree.
    """
    ts = ts or transfer_for(eq)
    m = _boundary_matrix_polynomials(ts, bc)
    gamma = m[0][0] * m[1][1] - m[0][1] * m[1][0]

    phi = ts.polynomial_matrix()
    c = bc.B.T @ cofactor(bc.A)
    expansion = ComplexPolynomial.constant(np.linalg.det(bc.A) + np.linalg.det(bc.B))
    for i in range(2):
        for j in range(2):
            expansion = expansion + c[i, j] * phi[i][j]

    norm_a, norm_b = np.linalg.norm(bc.A), np.linalg.norm(bc.B)
    scale = float((norm_a + norm_b * ts.coefficient_scale()) ** 2) or 1.0

    size = max(gamma.coeffs.size, expansion.coeffs.size)
    diff = np.max(np.abs(np.pad(gamma.coeffs, (0, size - gamma.coeffs.size))
                         - np.pad(expansion.coeffs, (0, size - expansion.coeffs.size))))
    if diff > tol.formula * scale:
        raise SLPError(
            code=ErrorCode.FORMULA_MISMATCH,
            message="determinant and cofactor expansion of Gamma disagree",
            details={"difference": float(diff), "scale": scale},
        )
    gamma = ComplexPolynomial(gamma.coeffs[: eq.N + 1]).trimmed(tol.degree)
    expansion = ComplexPolynomial(expansion.coeffs[: eq.N + 1])
    return CharacteristicPolynomial(gamma, expansion, scale)


# ============================================================================
# Roots and multiplicities
# ============================================================================

def _cluster(values: Sequence[complex], radius: float) -> List[List[complex]]:
    """Union of roots closer than radius * max(1, |lam|), in first-index order."""
    parent = list(range(len(values)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            reach = radius * max(1.0, abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) <= reach:
                parent[find(j)] = find(i)

    groups: dict = {}
    for i, value in enumerate(values):
        groups.setdefault(find(i), []).append(value)
    return list(groups.values())


def _newton_polish(poly: ComplexPolynomial, z: complex, limit: float, iterations: int = 6) -> complex:
    """Newton steps on poly that reduce |poly| and stay within ``limit`` of z."""
    deriv = poly.derivative()
    start, value = z, abs(poly(z))
    for _ in range(iterations):
        slope = deriv(z)
        if slope == 0 or value == 0:
            break
        candidate = z - poly(z) / slope
        candidate_value = abs(poly(candidate))
        if candidate_value >= value or abs(candidate - start) > limit:
            break
        z, value = candidate, candidate_value
    return z


def _derivative_scale(poly: ComplexPolynomial, lam: complex, order: int) -> float:
    """sum_j binom(j, k) |c_j| r^(j-k), r = max(1, |lam|)."""
    r = max(1.0, abs(lam))
    return float(sum(math.comb(j, order) * abs(c) * r ** (j - order)
                     for j, c in enumerate(poly.coeffs) if j >= order))


def _certified(poly: ComplexPolynomial, lam: complex, mult: int, tol: Tolerances) -> bool:
    if mult >= 3:
        return False
    for k in range(1, mult):
        value = abs(poly.derivative(k)(lam)) / math.factorial(k)
        if value > tol.multiplicity * _derivative_scale(poly, lam, k):
            return False
    return True


def polynomial_roots(
    poly: ComplexPolynomial, tol: Tolerances = DEFAULT_TOLERANCES
) -> Tuple[List[Tuple[complex, int, bool]], bool]:
    """
    Clustered roots of ``poly`` as (value, multiplicity, certified) triples.

    The second item is False when the companion eigenvalues were not all
    finite (partial result).
    """
    trimmed = poly.trimmed(tol.degree)
    degree = trimmed.coeffs.size - 1
    if degree <= 0 or trimmed.max_abs == 0.0:
        return [], True

    raw = npoly.polyroots(trimmed.coeffs)
    finite = np.isfinite(raw)
    converged = bool(np.all(finite))
    if not converged:
        logger.warning("Companion eigenvalues contain non-finite values",
                       extra={"degree": degree})
    raw = [complex(v) for v in raw[finite]]

    groups = _cluster(raw, tol.cluster)
    centers = [complex(np.mean(g)) for g in groups]
    roots = []
    for index, group in enumerate(groups):
        value = centers[index]
        if len(group) == 1:
            others = [abs(value - c) for i, c in enumerate(centers) if i != index]
            limit = 0.25 * min(others) if others else max(1.0, abs(value))
            value = _newton_polish(trimmed, value, limit)
        certified = _certified(trimmed, value, len(group), tol)
        if not certified:
            logger.warning(
                f"Multiplicity {len(group)} at {value:.6g} is not certified",
                extra={"degree": degree},
            )
        roots.append((value, len(group), certified))
    logger.debug(f"Found {len(raw)} roots in {len(groups)} clusters", extra={"degree": degree})
    return roots, converged


def _sorted(eigen: List[Eigenvalue]) -> Tuple[Eigenvalue, ...]:
    return tuple(sorted(eigen, key=lambda e: (e.value.real, e.value.imag)))


def _geometric_from_matrix(ts: TransferSystem, bc: BoundaryCondition, lam: complex,
                           tol: Tolerances) -> int:
    phi = ts.evaluate(lam)
    m = bc.A + bc.B @ phi
    scale = float(np.linalg.norm(bc.A) + np.linalg.norm(bc.B) * np.linalg.norm(phi)) or 1.0
    return max(1, 2 - mat2_rank(m, scale, tol.rank))


def is_self_adjoint_problem(eq: SLEquation, bc: BoundaryCondition,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return eq.is_real_positive_weight and is_self_adjoint(bc, tol)


def _build_report(
    char_poly: CharacteristicPolynomial,
    geometric: Callable[[complex], int],
    self_adjoint: bool,
    tol: Tolerances,
) -> SpectrumReport:
    if char_poly.is_whole_plane(tol):
        return SpectrumReport(SpectrumKind.WHOLE_PLANE, (), char_poly, self_adjoint, True)

    roots, converged = polynomial_roots(char_poly.gamma, tol)
    eigen = []
    for value, mult, certified in roots:
        if self_adjoint and abs(value.imag) <= tol.real_snap * max(1.0, abs(value)):
            value = complex(value.real, 0.0)
        geo = geometric(value)
        if geo > mult or (self_adjoint and geo != min(mult, 2)):
            logger.warning(
                f"Geometric multiplicity {geo} (rank of A + B Phi_N) does not match "
                f"analytic multiplicity {mult} at {value:.6g}",
            )
        eigen.append(Eigenvalue(value, mult, geo, certified))
    return SpectrumReport(SpectrumKind.FINITE, _sorted(eigen), char_poly, self_adjoint, converged)


@log_performance(logger)
def eigenvalues(
    eq: SLEquation,
    bc: BoundaryCondition,
    tol: Tolerances = DEFAULT_TOLERANCES,
    ts: Optional[TransferSystem] = None,
) -> SpectrumReport:
    """All eigenvalues with analytic and geometric multiplicities."""
    ts = ts or transfer_for(eq)
    char_poly = characteristic_polynomial(eq, bc, tol, ts)
    return _build_report(
        char_poly,
        lambda lam: _geometric_from_matrix(ts, bc, lam, tol),
        is_self_adjoint_problem(eq, bc, tol),
        tol,
    )


def _residual_scale(poly: ComplexPolynomial, lam: complex) -> float:
    return float(sum(abs(c) * abs(lam) ** k for k, c in enumerate(poly.coeffs)))


def require_eigenvalue(char_poly: CharacteristicPolynomial, lam: complex,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    """Raises SLPError(NOT_AN_EIGENVALUE) unless Gamma(lam) is negligible."""
    if char_poly.is_whole_plane(tol):
        return
    gamma = char_poly.gamma.trimmed(tol.degree)
    value = abs(gamma(lam))
    scale = _residual_scale(gamma, lam)
    if value > tol.eigenvalue * scale:
        raise SLPError(
            code=ErrorCode.NOT_AN_EIGENVALUE,
            message=f"{complex(lam):.12g} is not an eigenvalue",
            details={"gamma": value, "scale": scale},
        )


def simple_slope(char_poly: CharacteristicPolynomial, lam: complex,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> complex:
    """
    Gamma'(lam) after checking that lam is a simple eigenvalue.

    Raises:
        SLPError: NOT_AN_EIGENVALUE or NOT_SIMPLE.
    """
    require_eigenvalue(char_poly, lam, tol)
    gamma = char_poly.gamma.trimmed(tol.degree)
    slope = gamma.derivative()(lam)
    if char_poly.is_whole_plane(tol) or abs(slope) <= tol.simple * _derivative_scale(gamma, lam, 1):
        raise SLPError(
            code=ErrorCode.NOT_SIMPLE,
            message=f"eigenvalue {complex(lam):.12g} is not simple",
            details={"slope": abs(slope)},
        )
    return slope


def geometric_multiplicity(
    eq: SLEquation,
    bc: BoundaryCondition,
    lam: complex,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> int:
    """2 - rank(A + B Phi_N(lam)) at an eigenvalue."""
    ts = transfer_for(eq)
    require_eigenvalue(characteristic_polynomial(eq, bc, tol, ts), lam, tol)
    return _geometric_from_matrix(ts, bc, lam, tol)


# ============================================================================
# Eigenfunctions
# ============================================================================

def _boundary_matrix(ts: TransferSystem, bc: BoundaryCondition, lam: complex):
    phi = ts.evaluate(lam)
    m = bc.A + bc.B @ phi
    scale = float(np.linalg.norm(bc.A) + np.linalg.norm(bc.B) * np.linalg.norm(phi)) or 1.0
    return m, scale


def _normalize(seq: SolutionSequence, w: np.ndarray) -> complex:
    """Factor giving sum w|y|^2 = 1 and a positive first largest component."""
    norm = np.sqrt(seq.weighted_norm_squared(w))
    mags = np.abs(seq.y)
    k = int(np.nonzero(mags >= (1.0 - 1e-9) * mags.max())[0][0])
    phase = seq.y[k] / mags[k]
    return complex(np.conj(phase) / norm)


def eigenfunction(
    eq: SLEquation,
    bc: BoundaryCondition,
    lam: complex,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> EigenfunctionData:
    """
    Eigenfunction y = c1 phi + c2 psi at a geometrically simple eigenvalue.

    (c1, c2) = (m_i2, -m_i1) for the row i of M = A + B Phi_N(lam) holding
    the largest entry. Self-adjoint problems get the normalized eigenfunction.

    Raises:
        SLPError: NOT_AN_EIGENVALUE, GEOMETRIC_MULTIPLICITY_TWO.
    """
    ts = transfer_for(eq)
    require_eigenvalue(characteristic_polynomial(eq, bc, tol, ts), lam, tol)
    m, scale = _boundary_matrix(ts, bc, lam)
    if mat2_rank(m, scale, tol.rank) == 0:
        raise SLPError(
            code=ErrorCode.GEOMETRIC_MULTIPLICITY_TWO,
            message="eigenspace is two-dimensional; use eigenspace_basis",
            details={"lambda": [complex(lam).real, complex(lam).imag]},
        )
    row = int(np.unravel_index(np.argmax(np.abs(m)), m.shape)[0])
    c1, c2 = complex(m[row, 1]), complex(-m[row, 0])
    seq = solve_ivp(eq, lam, 0, c1, c2)

    normalized = False
    if is_self_adjoint_problem(eq, bc, tol):
        factor = _normalize(seq, eq.w.real)
        seq, c1, c2 = seq.scaled(factor), c1 * factor, c2 * factor
        normalized = True
    return EigenfunctionData(complex(lam), c1, c2, seq, normalized)


def eigenspace_basis(
    eq: SLEquation,
    bc: BoundaryCondition,
    lam: complex,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> List[SolutionSequence]:
    """One eigenfunction, or {phi, psi} when every solution is an eigenfunction."""
    ts = transfer_for(eq)
    require_eigenvalue(characteristic_polynomial(eq, bc, tol, ts), lam, tol)
    m, scale = _boundary_matrix(ts, bc, lam)
    if mat2_rank(m, scale, tol.rank) == 0:
        return [solve_ivp(eq, lam, 0, 1.0, 0.0), solve_ivp(eq, lam, 0, 0.0, 1.0)]
    return [eigenfunction(eq, bc, lam, tol).seq]


# ============================================================================
# Self-adjoint eigenvalue count
# ============================================================================

def self_adjoint_count(
    eq: SLEquation,
    bc: BoundaryCondition,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SelfAdjointCount:
    """
    Rank r and determinant kappa of
    [[-a11 + f0 a12, b12], [-a21 + f0 a22, b22]]; the problem has N - 2 + r
    eigenvalues.
    """
    if not is_self_adjoint_problem(eq, bc, tol):
        raise SLPError(
            code=ErrorCode.NOT_SELF_ADJOINT,
            message="eigenvalue count needs a real positive-weight equation and a self-adjoint condition",
        )
    f0 = complex(eq.f[0])
    a, b = bc.A, bc.B
    k = np.array([
        [-a[0, 0] + f0 * a[0, 1], b[0, 1]],
        [-a[1, 0] + f0 * a[1, 1], b[1, 1]],
    ], dtype=complex)
    scale = bc.scale * max(1.0, abs(f0))
    r = mat2_rank(k, scale, tol.rank)
    return SelfAdjointCount(r, complex(np.linalg.det(k)), eq.N - 2 + r)


# ============================================================================
# Pencil oracle
# ============================================================================

def pencil_matrices(eq: SLEquation, bc: BoundaryCondition) -> Tuple[np.ndarray, np.ndarray]:
    """M0, M1 with (M0 + lam M1) y = 0 encoding the equation and the condition."""
    n_max = eq.N
    size = n_max + 2
    m0 = np.zeros((size, size), dtype=complex)
    m1 = np.zeros((size, size), dtype=complex)
    f = eq.f
    for n in range(1, n_max + 1):
        row = n - 1
        m0[row, n - 1] = -f[n - 1]
        m0[row, n] = f[n] + f[n - 1] + eq.q_at(n)
        m0[row, n + 1] = -f[n]
        m1[row, n] = -eq.w_at(n)
    for i in range(2):
        row = n_max + i
        m0[row, 0] += bc.A[i, 0] - bc.A[i, 1] * f[0]
        m0[row, 1] += bc.A[i, 1] * f[0]
        m0[row, n_max] += bc.B[i, 0] - bc.B[i, 1] * f[n_max]
        m0[row, n_max + 1] += bc.B[i, 1] * f[n_max]
    return m0, m1


def pencil_determinant(eq: SLEquation, bc: BoundaryCondition) -> ComplexPolynomial:
    """
    det(M0 + lam M1) by polynomial elimination.

    Equation row n is used to eliminate y_{n+1}; its pivot -f_n is a nonzero
    constant, so only divisions by scalars occur. The remaining 2x2 block in
    (y_0, y_1) comes from the boundary rows.
    """
    m0, m1 = pencil_matrices(eq, bc)
    n_max = eq.N
    size = n_max + 2
    width = size + 1
    poly = np.zeros((size, size, width), dtype=complex)
    poly[:, :, 0] = m0
    poly[:, :, 1] = m1

    rows, cols = list(range(size)), list(range(size))
    sign, factor = 1.0, 1.0 + 0j
    for n in range(1, n_max + 1):
        prow, pcol = n - 1, n + 1
        pivot = poly[prow, pcol, 0]
        for r in rows:
            if r == prow or not np.any(poly[r, pcol]):
                continue
            multiplier = poly[r, pcol] / pivot
            for c in cols:
                if np.any(poly[prow, c]):
                    poly[r, c] -= np.convolve(multiplier, poly[prow, c])[:width]
            poly[r, pcol] = 0.0
        sign *= (-1.0) ** (rows.index(prow) + cols.index(pcol))
        factor *= pivot
        rows.remove(prow)
        cols.remove(pcol)

    (r1, r2), (c1, c2) = rows, cols
    block = (np.convolve(poly[r1, c1], poly[r2, c2]) - np.convolve(poly[r1, c2], poly[r2, c1]))
    return ComplexPolynomial(sign * factor * block[:width])


def pencil_oracle(
    eq: SLEquation,
    bc: BoundaryCondition,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SpectrumReport:
    """
    Spectrum from the linear pencil, independent of the transfer matrices.

    Raises:
        SLPError: SIZE_LIMIT for N above ORACLE_MAX_N.
    """
    if eq.N > ORACLE_MAX_N:
        raise SLPError(
            code=ErrorCode.SIZE_LIMIT,
            message=f"pencil oracle supports N <= {ORACLE_MAX_N}",
            details={"N": eq.N},
        )
    m0, m1 = pencil_matrices(eq, bc)
    det = pencil_determinant(eq, bc)
    row_norms = np.linalg.norm(m0, axis=1) + np.linalg.norm(m1, axis=1)
    scale = float(np.prod(row_norms)) or 1.0
    char_poly = CharacteristicPolynomial(det, det, scale)
    size = m0.shape[0]

    def geometric(lam: complex) -> int:
        pencil = m0 + lam * m1
        ref = float(np.linalg.norm(m0) + abs(lam) * np.linalg.norm(m1)) or 1.0
        return int(min(2, max(1, size - numeric_rank(pencil, ref, tol.rank))))

    return _build_report(char_poly, geometric, is_self_adjoint_problem(eq, bc, tol), tol)


def oracle_discrepancy(report: SpectrumReport, oracle: SpectrumReport,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> OracleComparison:
    """Monic coefficient and root discrepancies between two reports."""
    if report.kind != oracle.kind:
        return OracleComparison(float("inf"), float("inf"))
    if report.kind is SpectrumKind.WHOLE_PLANE:
        return OracleComparison(0.0, 0.0)

    a = report.char_poly.gamma.monic(tol.degree).coeffs
    b = oracle.char_poly.gamma.monic(tol.degree).coeffs
    if a.size != b.size:
        return OracleComparison(float("inf"), float("inf"))
    coefficient_error = float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(a))))

    left, right = report.values(expanded=True), oracle.values(expanded=True)
    if len(left) != len(right):
        return OracleComparison(coefficient_error, float("inf"))
    if not left:
        return OracleComparison(coefficient_error, 0.0)
    cost = np.array([[abs(x - y) / max(1.0, abs(x)) for y in right] for x in left])
    rows, cols = linear_sum_assignment(cost)
    return OracleComparison(coefficient_error, float(cost[rows, cols].max()))


def count_in_region(report: SpectrumReport, center: complex, radius: float) -> int:
    """Eigenvalues (with analytic multiplicity) strictly inside a disc."""
    if report.kind is SpectrumKind.WHOLE_PLANE:
        raise SLPError(
            code=ErrorCode.WHOLE_PLANE_SPECTRUM,
            message="every complex number is an eigenvalue; regions are not countable",
        )
    return sum(e.analytic_mult for e in report.eigenvalues if abs(e.value - center) < radius)
