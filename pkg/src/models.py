"""
Shared data models: the structured error type and validation reports.

Every module in the package raises :class:`SLPError`. It carries a
machine-readable ``code`` (one of :class:`ErrorCode`), a human-readable
``message`` and an optional ``details`` mapping for diagnostics such as the
offending index or a partially traced branch.

EXAMPLE USAGE:
>>> try:
...     bc.validate()
... except SLPError as e:
...     if e.code == ErrorCode.NOT_RANK_2:
...         print("boundary condition is degenerate")
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class ErrorCode(str, Enum):
    """Machine-readable error codes."""

    SHAPE_MISMATCH = "SHAPE_MISMATCH"
    VALIDATION_ERROR = "VALIDATION_ERROR"
    NOT_RANK_2 = "NOT_RANK_2"
    PARAM_OUT_OF_RANGE = "PARAM_OUT_OF_RANGE"
    FORMULA_MISMATCH = "FORMULA_MISMATCH"
    ROOT_FIND_FAILURE = "ROOT_FIND_FAILURE"
    NOT_AN_EIGENVALUE = "NOT_AN_EIGENVALUE"
    GEOMETRIC_MULTIPLICITY_TWO = "GEOMETRIC_MULTIPLICITY_TWO"
    NOT_SELF_ADJOINT = "NOT_SELF_ADJOINT"
    SIZE_LIMIT = "SIZE_LIMIT"
    WHOLE_PLANE_SPECTRUM = "WHOLE_PLANE_SPECTRUM"
    NOT_SIMPLE = "NOT_SIMPLE"
    CHART_TANGENT_MISMATCH = "CHART_TANGENT_MISMATCH"
    NOT_SELF_ADJOINT_CHART = "NOT_SELF_ADJOINT_CHART"
    NOT_SEPARATED_SELF_ADJOINT = "NOT_SEPARATED_SELF_ADJOINT"
    NOT_IN_CHART = "NOT_IN_CHART"
    MATCH_AMBIGUITY = "MATCH_AMBIGUITY"
    INVALID_GRID_POINT = "INVALID_GRID_POINT"
    ORACLE_MISMATCH = "ORACLE_MISMATCH"


# Codes the CLI reports as input validation failures (exit code 2).
VALIDATION_CODES = frozenset({
    ErrorCode.SHAPE_MISMATCH,
    ErrorCode.VALIDATION_ERROR,
    ErrorCode.NOT_RANK_2,
    ErrorCode.PARAM_OUT_OF_RANGE,
    ErrorCode.NOT_AN_EIGENVALUE,
    ErrorCode.GEOMETRIC_MULTIPLICITY_TWO,
    ErrorCode.NOT_SELF_ADJOINT,
    ErrorCode.SIZE_LIMIT,
    ErrorCode.WHOLE_PLANE_SPECTRUM,
    ErrorCode.NOT_SIMPLE,
    ErrorCode.CHART_TANGENT_MISMATCH,
    ErrorCode.NOT_SELF_ADJOINT_CHART,
    ErrorCode.NOT_SEPARATED_SELF_ADJOINT,
    ErrorCode.NOT_IN_CHART,
    ErrorCode.INVALID_GRID_POINT,
})


@dataclass(eq=False)
class SLPError(Exception):
    """
    Structured error raised by the spectral toolkit.

    Format of ``str(err)``: ``[CODE] message | Details: {...}`` so that log
    lines stay greppable by code.
    """

    code: ErrorCode
    message: str
    details: Optional[Dict[str, Any]] = None

    def __post_init__(self) -> None:
        super().__init__(self.message)

    def __str__(self) -> str:
        code = self.code.value if isinstance(self.code, ErrorCode) else str(self.code)
        error_str = f"[{code}] {self.message}"
        if self.details:
            error_str += f" | Details: {self.details}"
        return error_str

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by the CLI error channel."""
        code = self.code.value if isinstance(self.code, ErrorCode) else str(self.code)
        details = {
            key: value for key, value in (self.details or {}).items()
            if isinstance(value, (str, int, float, bool, list, dict, type(None)))
        }
        return {"code": code, "message": self.message, "details": details}


@dataclass(frozen=True)
class Violation:
    """One violated invariant of an equation or file."""

    field: str
    index: Optional[int]
    reason: str

    def __str__(self) -> str:
        where = self.field if self.index is None else f"{self.field}[{self.index}]"
        return f"{where}: {self.reason}"


@dataclass
class ValidationReport:
    """Result of a diagnostic validation pass."""

    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_invalid(self, subject: str = "equation") -> None:
        if self.violations:
            raise SLPError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"invalid {subject}: " + "; ".join(str(v) for v in self.violations),
                details={"violations": [str(v) for v in self.violations]},
            )

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)
