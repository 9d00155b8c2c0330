"""
Core domain types for discrete Sturm-Liouville problems.

The equation

    -nabla(f_n Delta y_n) + q_n y_n = lambda w_n y_n,    n = 1..N

is stored as the coefficient triple (f, q, w) with f indexed 0..N and q, w
indexed 1..N (held at array offsets 0..N-1). Polynomials in lambda are dense
coefficient arrays manipulated with ``numpy.polynomial.polynomial``; 2x2
matrices are plain complex ``numpy`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import numpy.polynomial.polynomial as npoly

from src.models import ErrorCode, SLPError, ValidationReport, Violation

Scalar = Union[int, float, complex, np.number]
Mat2 = np.ndarray


# ============================================================================
# Tolerances
# ============================================================================

@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds shared by every module (all relative)."""

    degree: float = 1e-10            # numeric_degree cut
    rank: float = 1e-8               # singular-value cut for rank decisions
    self_adjoint: float = 1e-10      # ||AEA* - BEB*|| test
    cluster: float = 1e-6            # root clustering radius, times max(1,|lambda|)
    real_snap: float = 1e-7          # imaginary snap for self-adjoint problems
    whole_plane: float = 1e-12       # Gamma == 0 detection
    formula: float = 1e-9            # agreement of the two Gamma formulas
    multiplicity: float = 1e-6       # |Gamma^(k)| cross-check for clusters
    eigenvalue: float = 1e-8         # |Gamma(lambda)| acceptance of a claimed eigenvalue
    simple: float = 1e-8             # |Gamma'(lambda)| below this means not simple
    refinement_cap: int = 12         # step halvings in branch tracing

    def scaled(self, factor: float) -> "Tolerances":
        """Return a copy with every threshold multiplied by ``factor``."""
        if factor <= 0:
            raise SLPError(
                code=ErrorCode.PARAM_OUT_OF_RANGE,
                message="tolerance scale must be positive",
                details={"factor": factor},
            )
        values = {
            f.name: getattr(self, f.name) * factor
            for f in fields(self)
            if f.name != "refinement_cap"
        }
        return replace(self, **values)


DEFAULT_TOLERANCES = Tolerances()


# ============================================================================
# Polynomials
# ============================================================================

@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    """Dense polynomial in lambda; ``coeffs[k]`` multiplies lambda**k."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(np.atleast_1d(self.coeffs), dtype=complex)
        if c.ndim != 1:
            raise SLPError(
                code=ErrorCode.SHAPE_MISMATCH,
                message="polynomial coefficients must be one-dimensional",
                details={"shape": list(c.shape)},
            )
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: Scalar) -> "ComplexPolynomial":
        return cls(np.array([value], dtype=complex))

    @classmethod
    def zero(cls) -> "ComplexPolynomial":
        return cls.constant(0.0)

    @classmethod
    def linear(cls, c0: Scalar, c1: Scalar) -> "ComplexPolynomial":
        """c0 + c1*lambda."""
        return cls(np.array([c0, c1], dtype=complex))

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other: Union["ComplexPolynomial", Scalar]) -> "ComplexPolynomial":
        if isinstance(other, ComplexPolynomial):
            return other
        return ComplexPolynomial.constant(other)

    def __add__(self, other):
        return ComplexPolynomial(npoly.polyadd(self.coeffs, self._coerce(other).coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        return ComplexPolynomial(npoly.polysub(self.coeffs, self._coerce(other).coeffs))

    def __rsub__(self, other):
        return ComplexPolynomial(npoly.polysub(self._coerce(other).coeffs, self.coeffs))

    def __neg__(self):
        return ComplexPolynomial(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, ComplexPolynomial):
            return ComplexPolynomial(npoly.polymul(self.coeffs, other.coeffs))
        return ComplexPolynomial(self.coeffs * complex(other))

    __rmul__ = __mul__

    def derivative(self, order: int = 1) -> "ComplexPolynomial":
        """Formal derivative of the given order."""
        if order == 0:
            return self
        if self.coeffs.size <= order:
            return ComplexPolynomial.zero()
        return ComplexPolynomial(npoly.polyder(self.coeffs, order))

    def __call__(self, lam):
        """Evaluate by Horner's scheme; accepts scalars or arrays."""
        value = npoly.polyval(lam, self.coeffs)
        if np.ndim(value) == 0:
            return complex(value)
        return value

    evaluate = __call__

    # -- degree logic -------------------------------------------------------

    def coefficient(self, k: int) -> complex:
        """Coefficient of lambda**k (zero beyond the stored length)."""
        if 0 <= k < self.coeffs.size:
            return complex(self.coeffs[k])
        return 0j

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def numeric_degree(self, tau: float = DEFAULT_TOLERANCES.degree) -> int:
        """Largest k with |c_k| > tau * max|c_j|; -1 for the zero polynomial."""
        mags = np.abs(self.coeffs)
        peak = mags.max()
        if peak == 0.0:
            return -1
        significant = np.nonzero(mags > tau * peak)[0]
        return int(significant[-1])

    def is_zero(self, threshold: float = 0.0) -> bool:
        return self.max_abs <= threshold

    def trimmed(self, tau: float = DEFAULT_TOLERANCES.degree) -> "ComplexPolynomial":
        """Drop coefficients above the numeric degree."""
        deg = self.numeric_degree(tau)
        if deg < 0:
            return ComplexPolynomial.zero()
        return ComplexPolynomial(self.coeffs[: deg + 1])

    def leading_coefficient(self, tau: float = DEFAULT_TOLERANCES.degree) -> complex:
        deg = self.numeric_degree(tau)
        return 0j if deg < 0 else complex(self.coeffs[deg])

    def monic(self, tau: float = DEFAULT_TOLERANCES.degree) -> "ComplexPolynomial":
        """Trimmed copy scaled to unit leading coefficient."""
        trimmed = self.trimmed(tau)
        lead = trimmed.coeffs[-1]
        if lead == 0:
            return trimmed
        return ComplexPolynomial(trimmed.coeffs / lead)

    def __repr__(self) -> str:
        terms = ", ".join(f"{c:.6g}" for c in self.coeffs)
        return f"ComplexPolynomial([{terms}])"


# ============================================================================
# 2x2 matrices
# ============================================================================

def as_mat2(values) -> Mat2:
    """Copy ``values`` into a 2x2 complex array."""
    arr = np.array(values, dtype=complex)
    if arr.shape != (2, 2):
        raise SLPError(
            code=ErrorCode.SHAPE_MISMATCH,
            message="expected a 2x2 matrix",
            details={"shape": list(arr.shape)},
        )
    return arr


def cofactor(m: Mat2) -> Mat2:
    """Cofactor matrix [[m22, -m21], [-m12, m11]]."""
    return np.array([[m[1, 1], -m[1, 0]], [-m[0, 1], m[0, 0]]], dtype=complex)


def numeric_rank(matrix: np.ndarray, scale: float, eps: float = DEFAULT_TOLERANCES.rank) -> int:
    """Rank from singular values with cut ``eps * scale``."""
    if scale <= 0:
        raise SLPError(
            code=ErrorCode.PARAM_OUT_OF_RANGE,
            message="rank scale must be positive",
            details={"scale": scale},
        )
    singular = np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)
    return int(np.count_nonzero(singular > eps * scale))


def mat2_rank(m: Mat2, scale: float, eps: float = DEFAULT_TOLERANCES.rank) -> int:
    """Rank 0, 1 or 2 of a 2x2 matrix relative to ``scale``."""
    return numeric_rank(as_mat2(m), scale, eps)


# ============================================================================
# Equations
# ============================================================================

class EquationClass(str, Enum):
    COMPLEX = "complex"
    REAL = "real"
    REAL_POSITIVE_WEIGHT = "real_positive_weight"


def infer_class(f: np.ndarray, q: np.ndarray, w: np.ndarray) -> EquationClass:
    """Most specific class the coefficients belong to."""
    stacked = np.concatenate([f, q, w])
    if np.any(stacked.imag != 0):
        return EquationClass.COMPLEX
    if np.all(w.real > 0):
        return EquationClass.REAL_POSITIVE_WEIGHT
    return EquationClass.REAL


def _readonly(values: Iterable[Scalar]) -> np.ndarray:
    arr = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=complex)
    arr = np.atleast_1d(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SLEquation:
    """
    Coefficients of the difference equation.

    ``f`` has N+1 entries (f_0..f_N); ``q`` and ``w`` have N entries holding
    q_1..q_N and w_1..w_N. Use :meth:`q_at` / :meth:`w_at` for 1-based access.
    """

    f: np.ndarray
    q: np.ndarray
    w: np.ndarray
    eq_class: EquationClass

    def __post_init__(self) -> None:
        f, q, w = _readonly(self.f), _readonly(self.q), _readonly(self.w)
        if q.size != w.size or f.size != q.size + 1:
            raise SLPError(
                code=ErrorCode.SHAPE_MISMATCH,
                message="f must have N+1 entries and q, w must have N entries",
                details={"len_f": int(f.size), "len_q": int(q.size), "len_w": int(w.size)},
            )
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "eq_class", EquationClass(self.eq_class))

    @classmethod
    def create(
        cls,
        f: Sequence[Scalar],
        q: Sequence[Scalar],
        w: Sequence[Scalar],
        eq_class: Optional[Union[EquationClass, str]] = None,
    ) -> "SLEquation":
        """Build an equation, inferring the class when it is not given."""
        f_arr, q_arr, w_arr = _readonly(f), _readonly(q), _readonly(w)
        if eq_class is None:
            eq_class = infer_class(f_arr, q_arr, w_arr)
        return cls(f_arr, q_arr, w_arr, EquationClass(eq_class))

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        return int(self.q.size)

    @property
    def inverse_f(self) -> np.ndarray:
        return 1.0 / self.f

    def q_at(self, n: int) -> complex:
        return complex(self.q[n - 1])

    def w_at(self, n: int) -> complex:
        return complex(self.w[n - 1])

    @property
    def is_real_positive_weight(self) -> bool:
        return self.eq_class is EquationClass.REAL_POSITIVE_WEIGHT

    def with_coefficients(
        self,
        f: Optional[Sequence[Scalar]] = None,
        q: Optional[Sequence[Scalar]] = None,
        w: Optional[Sequence[Scalar]] = None,
    ) -> "SLEquation":
        """Copy with some coefficient arrays replaced; the class is re-inferred."""
        return SLEquation.create(
            self.f if f is None else f,
            self.q if q is None else q,
            self.w if w is None else w,
        )

    def magnitude(self) -> float:
        """Largest coefficient magnitude, used as a residual scale."""
        return float(max(np.max(np.abs(self.f)), np.max(np.abs(self.q)),
                         np.max(np.abs(self.w)), 1.0))

    def __repr__(self) -> str:
        return f"SLEquation(N={self.N}, class={self.eq_class.value})"


def validate_equation(eq: SLEquation) -> ValidationReport:
    """Collect every violated equation invariant."""
    violations = []
    if eq.N < 2:
        violations.append(Violation("N", None, "must be at least 2"))
    for n, value in enumerate(eq.f):
        if value == 0:
            violations.append(Violation("f", n, "must be nonzero"))
    for n, value in enumerate(eq.w, start=1):
        if value == 0:
            violations.append(Violation("w", n, "must be nonzero"))

    if eq.eq_class in (EquationClass.REAL, EquationClass.REAL_POSITIVE_WEIGHT):
        for name, values, start in (("f", eq.f, 0), ("q", eq.q, 1), ("w", eq.w, 1)):
            for n, value in enumerate(values, start=start):
                if value.imag != 0:
                    violations.append(
                        Violation(name, n, f"imaginary part must vanish for class {eq.eq_class.value}")
                    )
    if eq.eq_class is EquationClass.REAL_POSITIVE_WEIGHT:
        for n, value in enumerate(eq.w, start=1):
            if value.real <= 0:
                violations.append(Violation("w", n, "must be positive for class real_positive_weight"))
    return ValidationReport(violations)


# ============================================================================
# Solution sequences
# ============================================================================

@dataclass(frozen=True, eq=False)
class SolutionSequence:
    """Values y_0..y_{N+1} with quasi-derivatives qd_n = f_n (y_{n+1} - y_n)."""

    y: np.ndarray
    qd: np.ndarray

    def __post_init__(self) -> None:
        y, qd = _readonly(self.y), _readonly(self.qd)
        if y.size != qd.size + 1:
            raise SLPError(
                code=ErrorCode.SHAPE_MISMATCH,
                message="y must have one more entry than qd",
                details={"len_y": int(y.size), "len_qd": int(qd.size)},
            )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "qd", qd)

    @classmethod
    def from_values(cls, y: Sequence[Scalar], f: Sequence[Scalar]) -> "SolutionSequence":
        y_arr = np.asarray(y, dtype=complex)
        return cls(y_arr, np.asarray(f, dtype=complex) * np.diff(y_arr))

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        return int(self.qd.size) - 1

    def scaled(self, factor: complex) -> "SolutionSequence":
        return SolutionSequence(self.y * factor, self.qd * factor)

    def boundary_values(self) -> np.ndarray:
        """(y_0, f_0 Delta y_0, y_N, f_N Delta y_N)."""
        n = self.N
        return np.array([self.y[0], self.qd[0], self.y[n], self.qd[n]], dtype=complex)

    def weighted_norm_squared(self, w: np.ndarray) -> float:
        """sum_{n=1..N} w_n |y_n|^2 (real part)."""
        return float(np.real(np.sum(w * np.abs(self.y[1 : self.N + 1]) ** 2)))
