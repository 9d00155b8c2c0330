"""
Problem and family files, and serialization of results.

Problem files are JSON objects

    {"N": 2, "f": [...], "q": [...], "w": [...], "bc": {...}, "class": "..."}

where every complex number is either a bare real or an ``[re, im]`` pair and
``bc`` is one of

    {"kind": "matrix", "A": 2x2, "B": 2x2}
    {"kind": "separated", "alpha": a, "beta": b}
    {"kind": "coupled", "gamma": g, "K": 2x2 real}

Family files add ``family`` (target, range, steps, index, chart, direction)
and ``start_lambda``. Structure is checked with pydantic; semantic invariants
(nonzero f and w, rank 2) are checked afterwards by the domain types.
"""

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.bc_space import (
    BCTangent,
    BoundaryCondition,
    ChartId,
    CoupledParams,
    SeparatedParams,
    canonical_bc,
    tangent_from_coords,
)
from src.logging_config import get_logger
from src.models import ErrorCode, SLPError
from src.perturbation import Branch, EquationTangent, FamilyTarget, ProblemFamily
from src.slp_core import EquationClass, SLEquation, validate_equation
from src.spectrum import OracleComparison, SpectrumReport

logger = get_logger(__name__)

ComplexValue = Union[float, Tuple[float, float]]
CSV_HEADER = ("param", "branch_id", "lambda_re", "lambda_im", "analytic_mult", "geometric_mult")


# ============================================================================
# Schema
# ============================================================================

def _check_2x2(value: List[List[Any]]) -> List[List[Any]]:
    if len(value) != 2 or any(len(row) != 2 for row in value):
        raise ValueError("must be a 2x2 array")
    return value


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class MatrixBCModel(_Strict):
    kind: Literal["matrix"]
    A: List[List[ComplexValue]]
    B: List[List[ComplexValue]]

    @field_validator("A", "B")
    @classmethod
    def check_shape(cls, value):
        return _check_2x2(value)


class SeparatedBCModel(_Strict):
    kind: Literal["separated"]
    alpha: float
    beta: float


class CoupledBCModel(_Strict):
    kind: Literal["coupled"]
    gamma: float
    K: List[List[float]]

    @field_validator("K")
    @classmethod
    def check_shape(cls, value):
        return _check_2x2(value)


BCModel = Annotated[
    Union[MatrixBCModel, SeparatedBCModel, CoupledBCModel],
    Field(discriminator="kind"),
]


class ProblemFileModel(_Strict):
    N: int = Field(ge=2)
    f: List[ComplexValue]
    q: List[ComplexValue]
    w: List[ComplexValue]
    bc: BCModel
    eq_class: Optional[EquationClass] = Field(default=None, alias="class")

    @model_validator(mode="after")
    def _lengths(self) -> "ProblemFileModel":
        problems = []
        if len(self.f) != self.N + 1:
            problems.append(f"f has {len(self.f)} entries, expected N+1 = {self.N + 1}")
        for name in ("q", "w"):
            size = len(getattr(self, name))
            if size != self.N:
                problems.append(f"{name} has {size} entries, expected N = {self.N}")
        if problems:
            raise ValueError("; ".join(problems))
        return self


class BCTangentModel(_Strict):
    chart: ChartId
    H: Optional[List[List[ComplexValue]]] = None
    L: Optional[List[List[ComplexValue]]] = None
    dcoords: Optional[List[ComplexValue]] = None

    @model_validator(mode="after")
    def _one_form(self) -> "BCTangentModel":
        if (self.dcoords is None) == (self.H is None and self.L is None):
            raise ValueError("give either dcoords or H and L")
        if self.dcoords is None and (self.H is None or self.L is None):
            raise ValueError("H and L must be given together")
        return self


class EquationTangentModel(_Strict):
    h: List[float]
    k: List[float]
    l: List[float]


class FamilySpecModel(_Strict):
    target: FamilyTarget
    range: Tuple[float, float]
    steps: int = Field(ge=2)
    index: Optional[int] = None
    chart: Optional[ChartId] = None
    direction: Optional[Union[BCTangentModel, EquationTangentModel]] = None


class FamilyFileModel(ProblemFileModel):
    family: FamilySpecModel
    start_lambda: Optional[ComplexValue] = None
    starts: Optional[List[ComplexValue]] = None

    @model_validator(mode="after")
    def _one_start(self) -> "FamilyFileModel":
        if (self.start_lambda is None) == (self.starts is None):
            raise ValueError("give exactly one of start_lambda or starts")
        if self.starts is not None and not self.starts:
            raise ValueError("starts must not be empty")
        return self


# ============================================================================
# Parsed objects
# ============================================================================

@dataclass(frozen=True, eq=False)
class Problem:
    """Equation, boundary condition and the bc payload as written."""

    eq: SLEquation
    bc: BoundaryCondition
    bc_spec: Dict[str, Any]
    declared_class: Optional[EquationClass] = None


@dataclass(frozen=True, eq=False)
class FamilyProblem:
    problem: Problem
    family: ProblemFamily
    starts: List[complex]
    group: bool


def to_complex(value: ComplexValue) -> complex:
    if isinstance(value, (tuple, list)):
        return complex(value[0], value[1])
    return complex(value)


def _complex_matrix(rows) -> np.ndarray:
    return np.array([[to_complex(v) for v in row] for row in rows], dtype=complex)


def encode_complex(value: complex) -> Union[float, List[float]]:
    """Bare number for reals, ``[re, im]`` otherwise."""
    value = complex(value)
    if value.imag == 0.0:
        return float(value.real)
    return [float(value.real), float(value.imag)]


def _format_errors(exc: ValidationError) -> List[Dict[str, str]]:
    return [
        {"loc": ".".join(str(part) for part in err["loc"]), "msg": err["msg"]}
        for err in exc.errors()
    ]


class ProblemParser:
    """Parser and canonical serializer for problem and family files."""

    def _validate(self, model_cls, text: str, source: str):
        try:
            return model_cls.model_validate_json(text)
        except ValidationError as exc:
            errors = _format_errors(exc)
            summary = "; ".join(f"{e['loc'] or '<root>'}: {e['msg']}" for e in errors)
            raise SLPError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"{source}: {summary}",
                details={"errors": errors, "source": source},
            ) from exc

    def _build_bc(self, model) -> Tuple[BoundaryCondition, Dict[str, Any]]:
        if isinstance(model, SeparatedBCModel):
            bc = canonical_bc(SeparatedParams(model.alpha, model.beta))
        elif isinstance(model, CoupledBCModel):
            bc = canonical_bc(CoupledParams(model.gamma, np.array(model.K, dtype=float)))
        else:
            bc = BoundaryCondition(_complex_matrix(model.A), _complex_matrix(model.B))
        bc.validate()
        return bc, model.model_dump()

    def _build_problem(self, model: ProblemFileModel, source: str) -> Problem:
        eq = SLEquation.create(
            [to_complex(v) for v in model.f],
            [to_complex(v) for v in model.q],
            [to_complex(v) for v in model.w],
            model.eq_class,
        )
        report = validate_equation(eq)
        if not report.ok:
            raise SLPError(
                code=ErrorCode.VALIDATION_ERROR,
                message=f"{source}: " + "; ".join(str(v) for v in report.violations),
                details={"violations": [str(v) for v in report.violations], "source": source},
            )
        bc, bc_fields = self._build_bc(model.bc)
        return Problem(eq, bc, bc_fields, model.eq_class)

    def parse(self, text: str, source: str = "<string>") -> Problem:
        """
        Parse and validate a problem file.

        Raises:
            SLPError: VALIDATION_ERROR with field paths, or NOT_RANK_2 /
            PARAM_OUT_OF_RANGE from the boundary condition.
        """
        model = self._validate(ProblemFileModel, text, source)
        return self._build_problem(model, source)

    def parse_family(self, text: str, source: str = "<string>") -> FamilyProblem:
        model = self._validate(FamilyFileModel, text, source)
        problem = self._build_problem(model, source)
        fam = model.family
        family = ProblemFamily(
            base_eq=problem.eq,
            base_bc=problem.bc,
            target=fam.target,
            param_range=fam.range,
            steps=fam.steps,
            index=fam.index,
            chart=fam.chart,
            direction=self._direction(fam.direction),
        )
        starts = [to_complex(v) for v in model.starts] if model.starts else [to_complex(model.start_lambda)]
        return FamilyProblem(problem, family, starts, group=model.starts is not None)

    def parse_tangent(self, text: str) -> Union[BCTangent, EquationTangent]:
        """Inline tangent payload: BC tangent (chart + H/L or dcoords) or (h, k, l)."""
        try:
            model = self._validate(BCTangentModel, text, "--tangent")
        except SLPError:
            model = self._validate(EquationTangentModel, text, "--tangent")
        return self._direction(model)

    def _direction(self, model) -> Union[BCTangent, EquationTangent, None]:
        if model is None:
            return None
        if isinstance(model, EquationTangentModel):
            return EquationTangent(model.h, model.k, model.l)
        if model.dcoords is not None:
            return tangent_from_coords(model.chart, [to_complex(v) for v in model.dcoords])
        return BCTangent(model.chart, _complex_matrix(model.H), _complex_matrix(model.L))

    def load(self, path: Union[str, Path]) -> Problem:
        path = Path(path)
        return self.parse(path.read_text(encoding="utf-8"), source=str(path))

    def load_family(self, path: Union[str, Path]) -> FamilyProblem:
        path = Path(path)
        return self.parse_family(path.read_text(encoding="utf-8"), source=str(path))

    def dumps(self, problem: Problem) -> str:
        """Canonical text: 2-space indent, keys N, f, q, w, bc, class."""
        data: Dict[str, Any] = {
            "N": problem.eq.N,
            "f": [encode_complex(v) for v in problem.eq.f],
            "q": [encode_complex(v) for v in problem.eq.q],
            "w": [encode_complex(v) for v in problem.eq.w],
            "bc": self._bc_payload(problem.bc_spec),
        }
        if problem.declared_class is not None:
            data["class"] = problem.declared_class.value
        return json.dumps(data, indent=2) + "\n"

    @staticmethod
    def _bc_payload(fields: Dict[str, Any]) -> Dict[str, Any]:
        kind = fields["kind"]
        if kind == "separated":
            return {"kind": kind, "alpha": float(fields["alpha"]), "beta": float(fields["beta"])}
        if kind == "coupled":
            return {"kind": kind, "gamma": float(fields["gamma"]),
                    "K": [[float(v) for v in row] for row in fields["K"]]}
        return {
            "kind": kind,
            "A": [[encode_complex(to_complex(v)) for v in row] for row in fields["A"]],
            "B": [[encode_complex(to_complex(v)) for v in row] for row in fields["B"]],
        }


# ============================================================================
# Output formatting
# ============================================================================

def _g17(value: float) -> str:
    return format(float(value), ".17g")


def spectrum_payload(report: SpectrumReport, comparison: Optional[OracleComparison] = None) -> Dict[str, Any]:
    payload = report.to_dict()
    if comparison is not None:
        payload["oracle"] = {
            "coefficient_error": comparison.coefficient_error,
            "root_error": comparison.root_error,
        }
    return payload


def spectrum_csv(report: SpectrumReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("index", "lambda_re", "lambda_im", "analytic_mult", "geometric_mult", "certified"))
    for i, e in enumerate(report.eigenvalues):
        writer.writerow((i, _g17(e.value.real), _g17(e.value.imag),
                         e.analytic_mult, e.geometric_mult, str(e.certified).lower()))
    return buffer.getvalue()


def branch_rows(branches: Sequence[Branch]) -> List[Tuple]:
    """One row per (sample, branch), sorted by (param, branch_id)."""
    rows = [
        (s.param, b.branch_id, s.lam.real, s.lam.imag, s.analytic_mult, s.geometric_mult)
        for b in branches
        for s in b.samples
    ]
    return sorted(rows, key=lambda r: (r[0], r[1]))


def write_branch_csv(stream: TextIO, branches: Sequence[Branch], marker: Optional[str] = None) -> int:
    """Write the branch CSV; ``marker`` adds a trailing ``# ...`` diagnostic row."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    rows = branch_rows(branches)
    for param, branch_id, re, im, am, gm in rows:
        writer.writerow((_g17(param), branch_id, _g17(re), _g17(im), am, gm))
    if marker:
        stream.write(f"# {marker}\n")
    logger.debug(f"Wrote {len(rows)} branch rows", extra={"n_points": len(rows)})
    return len(rows)


def read_branch_csv(stream: TextIO) -> List[Dict[str, Any]]:
    """Rows of a branch CSV (marker lines skipped), values parsed."""
    rows = []
    reader = csv.DictReader(line for line in stream if not line.startswith("#"))
    for row in reader:
        rows.append({
            "param": float(row["param"]),
            "branch_id": int(row["branch_id"]),
            "lam": complex(float(row["lambda_re"]), float(row["lambda_im"])),
            "analytic_mult": int(row["analytic_mult"]),
            "geometric_mult": int(row["geometric_mult"]),
        })
    return rows
