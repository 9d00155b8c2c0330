"""
Transfer matrices Phi_n(lambda) and initial-value solutions.

Phi_n maps (y_0, f_0 Delta y_0) to (y_n, f_n Delta y_n) along every solution:

    Phi_0 = I,
    Phi_n = [[1, 1/f_{n-1}], [q_n - lam w_n, 1 + (q_n - lam w_n)/f_{n-1}]] Phi_{n-1}.

Column 0 of Phi_n is (phi_n, f_n Delta phi_n) and column 1 is
(psi_n, f_n Delta psi_n). The whole sequence is built once per equation as a
coefficient tensor and evaluated with ``numpy.polynomial.polynomial.polyval``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional

import numpy as np
import numpy.polynomial.polynomial as npoly

from src.logging_config import get_logger
from src.models import ErrorCode, SLPError
from src.slp_core import ComplexPolynomial, Mat2, SLEquation, SolutionSequence

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class TransferSystem:
    """
    Transfer matrices of one equation.

    ``coeffs[n, k, i, j]`` is the coefficient of lambda**k in entry (i, j) of
    Phi_n. Row 0 holds values, row 1 quasi-derivatives.
    """

    eq: SLEquation
    coeffs: np.ndarray

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        return self.eq.N

    def entry(self, n: int, i: int, j: int) -> ComplexPolynomial:
        return ComplexPolynomial(self.coeffs[n, :, i, j])

    def polynomial_matrix(self, n: Optional[int] = None) -> List[List[ComplexPolynomial]]:
        """Phi_n as a nested list of polynomials (defaults to n = N)."""
        n = self.N if n is None else n
        return [[self.entry(n, i, j) for j in range(2)] for i in range(2)]

    def evaluate(self, lam: complex, n: Optional[int] = None) -> Mat2:
        """Phi_n(lam) as a 2x2 array (defaults to n = N)."""
        n = self.N if n is None else n
        return np.asarray(npoly.polyval(lam, self.coeffs[n]), dtype=complex)

    def derivative_at(self, lam: complex, n: Optional[int] = None, order: int = 1) -> Mat2:
        """Entrywise lambda-derivative of Phi_n at lam."""
        n = self.N if n is None else n
        if order >= self.coeffs.shape[1]:
            return np.zeros((2, 2), dtype=complex)
        return np.asarray(npoly.polyval(lam, npoly.polyder(self.coeffs[n], order, axis=0)),
                          dtype=complex)

    def determinant(self, n: Optional[int] = None) -> ComplexPolynomial:
        """det Phi_n as a polynomial; identically 1 in exact arithmetic."""
        phi = self.polynomial_matrix(n)
        return phi[0][0] * phi[1][1] - phi[0][1] * phi[1][0]

    def coefficient_scale(self, n: Optional[int] = None) -> float:
        n = self.N if n is None else n
        return float(max(1.0, np.max(np.abs(self.coeffs[n]))))


@dataclass(frozen=True)
class FundamentalPair:
    """phi and psi solutions at one lambda."""

    lam: complex
    phi_seq: SolutionSequence
    psi_seq: SolutionSequence


@dataclass(frozen=True)
class LeadingTerms:
    """Coefficients of lambda^(N-1), lambda^(N-1), lambda^N, lambda^N."""

    phi: complex
    psi: complex
    qd_phi: complex
    qd_psi: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.psi, self.qd_phi, self.qd_psi], dtype=complex)


def _step_matrices(eq: SLEquation, n: int):
    """Constant and lambda parts of the one-step matrix taking index n-1 to n."""
    inv_f = 1.0 / eq.f[n - 1]
    qn, wn = eq.q_at(n), eq.w_at(n)
    step0 = np.array([[1.0, inv_f], [qn, 1.0 + qn * inv_f]], dtype=complex)
    step1 = np.array([[0.0, 0.0], [-wn, -wn * inv_f]], dtype=complex)
    return step0, step1


def build_transfer(eq: SLEquation) -> TransferSystem:
    """Run the transfer recursion symbolically in lambda."""
    size = eq.N + 1
    coeffs = np.zeros((size, size, 2, 2), dtype=complex)
    coeffs[0, 0] = np.eye(2)
    for n in range(1, size):
        step0, step1 = _step_matrices(eq, n)
        prev = coeffs[n - 1]
        current = np.einsum("ab,kbc->kac", step0, prev)
        current[1:] += np.einsum("ab,kbc->kac", step1, prev[:-1])
        coeffs[n] = current
    coeffs.setflags(write=False)
    logger.debug("Built transfer system", extra={"n_points": eq.N})
    return TransferSystem(eq, coeffs)


@lru_cache(maxsize=512)
def transfer_for(eq: SLEquation) -> TransferSystem:
    """Cached :func:`build_transfer`; equations are immutable, keyed by identity."""
    return build_transfer(eq)


def leading_terms(ts: TransferSystem) -> LeadingTerms:
    n = ts.N
    top = ts.coeffs[n]
    return LeadingTerms(
        phi=complex(top[n - 1, 0, 0]),
        psi=complex(top[n - 1, 0, 1]),
        qd_phi=complex(top[n, 1, 0]),
        qd_psi=complex(top[n, 1, 1]),
    )


def closed_form_leading_terms(eq: SLEquation) -> LeadingTerms:
    """Leading coefficients from the product of w_i / f_i, i = 1..N-1."""
    n = eq.N
    product = complex(np.prod(eq.w[: n - 1] / eq.f[1:n]))
    sign = (-1.0) ** (n - 1)
    f0, wn = complex(eq.f[0]), eq.w_at(n)
    return LeadingTerms(
        phi=sign * product,
        psi=sign * product / f0,
        qd_phi=-sign * wn * product,
        qd_psi=-sign * wn * product / f0,
    )


def solve_ivp(eq: SLEquation, lam: complex, m: int, z_m: complex, z_m_qd: complex) -> SolutionSequence:
    """
    Unique solution with y_m = z_m and f_m Delta y_m = z_m_qd.

    Marches forward from m to N with the one-step matrix and backward from m
    to 0 with its explicit inverse [[1 + c/f, -1/f], [-c, 1]] (det = 1).

    Raises:
        SLPError: PARAM_OUT_OF_RANGE when m is outside [0, N].
    """
    n_max = eq.N
    if not 0 <= m <= n_max:
        raise SLPError(
            code=ErrorCode.PARAM_OUT_OF_RANGE,
            message="initial index must lie in [0, N]",
            details={"m": m, "N": n_max},
        )
    y = np.zeros(n_max + 2, dtype=complex)
    qd = np.zeros(n_max + 1, dtype=complex)
    y[m], qd[m] = z_m, z_m_qd

    for n in range(m + 1, n_max + 1):
        c = eq.q_at(n) - lam * eq.w_at(n)
        inv_f = 1.0 / eq.f[n - 1]
        y[n] = y[n - 1] + inv_f * qd[n - 1]
        qd[n] = c * y[n - 1] + (1.0 + c * inv_f) * qd[n - 1]

    for n in range(m, 0, -1):
        c = eq.q_at(n) - lam * eq.w_at(n)
        inv_f = 1.0 / eq.f[n - 1]
        y[n - 1] = (1.0 + c * inv_f) * y[n] - inv_f * qd[n]
        qd[n - 1] = qd[n] - c * y[n]

    y[n_max + 1] = y[n_max] + qd[n_max] / eq.f[n_max]
    return SolutionSequence.from_values(y, eq.f)


def fundamental_pair(eq: SLEquation, lam: complex) -> FundamentalPair:
    return FundamentalPair(
        lam=complex(lam),
        phi_seq=solve_ivp(eq, lam, 0, 1.0, 0.0),
        psi_seq=solve_ivp(eq, lam, 0, 0.0, 1.0),
    )


def equation_residual(eq: SLEquation, lam: complex, seq: SolutionSequence) -> np.ndarray:
    """-(qd_n - qd_{n-1}) + (q_n - lam w_n) y_n for n = 1..N."""
    n_max = eq.N
    interior = seq.y[1 : n_max + 1]
    return -(seq.qd[1 : n_max + 1] - seq.qd[:n_max]) + (eq.q - lam * eq.w) * interior
