"""
Discrete Sturm-Liouville spectral toolkit.

Eigenvalues with multiplicities, boundary-condition charts and
classification, eigenvalue branches along one-parameter families, and
derivative formulas for simple eigenvalues.
"""

__version__ = "1.0.0"
__author__ = "Enterprise Development Team"

from src.models import ErrorCode, SLPError
from src.slp_core import DEFAULT_TOLERANCES, SLEquation, Tolerances
from src.bc_space import BoundaryCondition, BCTangent, ChartId, classify, normalize_to_chart
from src.spectrum import SpectrumReport, characteristic_polynomial, eigenvalues, pencil_oracle
from src.perturbation import (
    EquationTangent,
    FamilyTarget,
    ProblemFamily,
    bc_derivative,
    branch_trace,
    equation_derivative,
)
from src.parser import ProblemParser

__all__ = [
    "ErrorCode",
    "SLPError",
    "DEFAULT_TOLERANCES",
    "SLEquation",
    "Tolerances",
    "BoundaryCondition",
    "BCTangent",
    "ChartId",
    "classify",
    "normalize_to_chart",
    "SpectrumReport",
    "characteristic_polynomial",
    "eigenvalues",
    "pencil_oracle",
    "EquationTangent",
    "FamilyTarget",
    "ProblemFamily",
    "bc_derivative",
    "branch_trace",
    "equation_derivative",
    "ProblemParser",
]
