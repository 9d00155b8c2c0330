"""
Reference problems and the six branch sweeps regenerated by ``examples``.

Each sweep traces eigenvalue branches through the library only; the starting
eigenvalues are picked by their rank in the computed spectrum of the first
problem. Closed-form values are used afterwards, to measure the deviation of
every CSV row and record it in ``reference_values.json``.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

from src.bc_space import BoundaryCondition, ChartId, separated_bc
from src.logging_config import LogContext, get_logger
from src.perturbation import Branch, FamilyTarget, ProblemFamily, branch_trace_group, evaluate_grid
from src.parser import write_branch_csv
from src.slp_core import DEFAULT_TOLERANCES, SLEquation, Tolerances

logger = get_logger(__name__)

REFERENCE_TOLERANCE = 1e-9
SIDECAR_NAME = "reference_values.json"
SWEEP_NAMES = ("fig5_1", "fig5_2", "fig5_3", "fig5_4", "fig5_5", "fig5_6")


# ============================================================================
# Reference problems
# ============================================================================

def fourier_equation(w2: float = 1.0) -> SLEquation:
    """N = 2, f = 1, q = 0, w = (1, w2)."""
    return SLEquation.create([1.0, 1.0, 1.0], [0.0, 0.0], [1.0, w2])


def multiplicity_gap_bc(c: complex) -> BoundaryCondition:
    """[[c, 2c+1, 0, 0], [0, 0, c, 1]]; Gamma = (c^2+2c+2) lam - (c+1) lam^2 on the Fourier equation."""
    return BoundaryCondition.from_matrix([[c, 2 * c + 1, 0, 0], [0, 0, c, 1]])


def indefinite_weight_bc(alpha: float) -> BoundaryCondition:
    c, s = math.cos(alpha), math.sin(alpha)
    return BoundaryCondition.from_matrix([[c, 2 * c - s, 0, 0], [0, 0, c, -s]])


def indefinite_weight(alpha: float) -> float:
    """w_2 making 0 a double eigenvalue with a one-dimensional eigenspace."""
    return (math.sin(2 * alpha) - 1.0) / math.sin(alpha) ** 2


def crossing_bc(a12: float, b21: float) -> BoundaryCondition:
    """[[1, a12, -1, 0], [0, -1, b21, 1]], a point of chart O14."""
    return BoundaryCondition.from_matrix([[1, a12, -1, 0], [0, -1, b21, 1]])


def shared_bc() -> BoundaryCondition:
    """[[1, -1, 0, 1], [0, 1, -1, 0]], a point of chart O13."""
    return BoundaryCondition.from_matrix([[1, -1, 0, 1], [0, 1, -1, 0]])


def f0_equation(s: float) -> SLEquation:
    return SLEquation.create([s, 1.0, 1.0], [0.0, 0.0], [1.0, 1.0])


def q1_equation(s: float) -> SLEquation:
    return SLEquation.create([-1.0, 1.0, 1.0], [s, 0.0], [1.0, 1.0])


def w1_equation(s: float) -> SLEquation:
    return SLEquation.create([-1.0, 1.0, 1.0], [0.0, 0.0], [s, 1.0])


# ============================================================================
# Closed forms
# ============================================================================

def alpha_branch_pi(alpha: float) -> float:
    """Only eigenvalue for S_{alpha,pi} on the Fourier equation."""
    c, s = math.cos(alpha), math.sin(alpha)
    return (2 * c + s) / (c + s)


def alpha_roots_half_pi(alpha: float) -> Tuple[float, float]:
    """(lam_minus, lam_plus) for S_{alpha,pi/2}, evaluated without cancellation."""
    c, s = math.cos(alpha), math.sin(alpha)
    b = 3 * c + 2 * s
    root = math.sqrt(c * c + 4 * math.sin(2 * alpha) + 4)
    denom = 2 * (c + s)
    if b >= 0:
        plus = (b + root) / denom
        minus = 2 * c / (b + root)
    else:
        minus = (b - root) / denom
        plus = 2 * c / (b - root)
    return minus, plus


def _ordered_pair(x: float, y: float) -> Tuple[float, float]:
    return (x, y) if x <= y else (y, x)


def crossing_pair(a12: float) -> Tuple[float, float]:
    return _ordered_pair(0.0, 2 * (a12 - 2) / (a12 - 1))


def f0_pair(s: float) -> Tuple[float, float]:
    return _ordered_pair(1.0, -1.0 / s)


def q1_pair(s: float) -> Tuple[float, float]:
    return _ordered_pair(1.0, 1.0 + s)


def w1_pair(s: float) -> Tuple[float, float]:
    return _ordered_pair(1.0, 1.0 / s)


# ============================================================================
# Sweeps
# ============================================================================

Reference = Callable[[float], complex]


@dataclass(frozen=True, eq=False)
class BranchGroup:
    """Branches traced jointly; ``start_ranks`` index the sorted start spectrum."""

    family: ProblemFamily
    start_ranks: Tuple[int, ...]
    branch_ids: Tuple[int, ...]
    references: Tuple[Reference, ...]


@dataclass(frozen=True, eq=False)
class Sweep:
    """``name`` is the output file stem; ``label`` says what is swept."""

    name: str
    label: str
    description: str
    groups: Tuple[BranchGroup, ...]


@dataclass
class SweepResult:
    name: str
    branches: List[Branch]
    rows: List[Dict[str, float]] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        return max((r["error"] for r in self.rows), default=0.0)


def _pair_refs(pair: Callable[[float], Tuple[float, float]]) -> Tuple[Reference, Reference]:
    return (lambda t: complex(pair(t)[0])), (lambda t: complex(pair(t)[1]))


def sweeps(steps: int = 100) -> List[Sweep]:
    """The six reference sweeps, in output order."""
    fourier = fourier_equation()
    turn = 3 * math.pi / 4

    def alpha_family(beta: float, lo: float, hi: float) -> ProblemFamily:
        return ProblemFamily(fourier, separated_bc(0.0, beta), FamilyTarget.SEPARATED_ALPHA, (lo, hi), steps)

    def minus(t: float) -> complex:
        return complex(alpha_roots_half_pi(t)[0])

    def plus(t: float) -> complex:
        return complex(alpha_roots_half_pi(t)[1])

    return [
        Sweep(
            "fig5_1", "alpha_beta_pi", "S_{alpha,pi}: the single eigenvalue branch",
            (BranchGroup(alpha_family(math.pi, 0.0, turn - 0.01), (0,), (0,),
                         (lambda t: complex(alpha_branch_pi(t)),)),),
        ),
        Sweep(
            "fig5_2", "alpha_beta_half_pi", "S_{alpha,pi/2}: lower branch, the branch through 1, upper branch",
            (
                BranchGroup(alpha_family(math.pi / 2, 0.0, turn - 0.05), (0,), (0,), (minus,)),
                BranchGroup(alpha_family(math.pi / 2, 0.0, math.pi - 0.01), (1,), (1,), (plus,)),
                BranchGroup(alpha_family(math.pi / 2, math.pi - 0.01, turn + 0.05), (1,), (2,), (minus,)),
            ),
        ),
        Sweep(
            "fig5_3", "chart_o14_a12", "chart O14, a12 sweep at b21 = 0 with a double eigenvalue at a12 = 2",
            (BranchGroup(
                ProblemFamily(fourier, crossing_bc(1.01, 0.0), FamilyTarget.BC_CHART_COORD,
                              (1.01, 3.98), steps, index=0, chart=ChartId.O14),
                (0, 1), (0, 1), _pair_refs(crossing_pair)),),
        ),
        Sweep(
            "fig5_4", "f0_crossing", "f_0 sweep, crossing at f_0 = -1",
            (BranchGroup(
                ProblemFamily(f0_equation(-1.0), shared_bc(), FamilyTarget.EQ_F,
                              (-2.5, -0.025), steps, index=0),
                (0, 1), (0, 1), _pair_refs(f0_pair)),),
        ),
        Sweep(
            "fig5_5", "q1_crossing", "q_1 sweep, crossing at q_1 = 0",
            (BranchGroup(
                ProblemFamily(q1_equation(0.0), shared_bc(), FamilyTarget.EQ_Q,
                              (-2.0, 1.96), steps, index=1),
                (0, 1), (0, 1), _pair_refs(q1_pair)),),
        ),
        Sweep(
            "fig5_6", "w1_crossing", "w_1 sweep, crossing at w_1 = 1",
            (BranchGroup(
                ProblemFamily(w1_equation(1.0), shared_bc(), FamilyTarget.EQ_W,
                              (0.04, 4.0), steps, index=1),
                (0, 1), (0, 1), _pair_refs(w1_pair)),),
        ),
    ]


def _trace_group(group: BranchGroup, tol: Tolerances, workers: int) -> List[Branch]:
    first = evaluate_grid(group.family, group.family.grid()[:1], tol)[0]
    spectrum = first.values(expanded=True)
    starts = [spectrum[rank] for rank in group.start_ranks]
    traced = branch_trace_group(group.family, starts, tol, workers)
    return [
        Branch(branch_id, branch.samples, branch.continuity_radius)
        for branch_id, branch in zip(group.branch_ids, traced)
    ]


def run_sweep(sweep: Sweep, tol: Tolerances = DEFAULT_TOLERANCES, workers: int = 1) -> SweepResult:
    """Trace every group of a sweep and compare each sample with its closed form."""
    result = SweepResult(sweep.name, [])
    with LogContext(logger, f"Regenerating {sweep.name} ({sweep.label})", sweep=sweep.name):
        for group in sweep.groups:
            branches = _trace_group(group, tol, workers)
            result.branches.extend(branches)
            for branch, reference in zip(branches, group.references):
                for sample in branch.samples:
                    expected = reference(sample.param)
                    error = abs(sample.lam - expected) / max(1.0, abs(expected))
                    result.rows.append({
                        "param": sample.param,
                        "branch_id": branch.branch_id,
                        "reference_re": expected.real,
                        "reference_im": expected.imag,
                        "error": error,
                    })
    result.rows.sort(key=lambda r: (r["param"], r["branch_id"]))
    logger.info(f"{sweep.name}: max deviation {result.max_error:.3g}",
                extra={"sweep": sweep.name})
    return result


@dataclass
class ExamplesSummary:
    max_errors: Dict[str, float]
    tolerance: float = REFERENCE_TOLERANCE

    @property
    def passed(self) -> bool:
        return all(err <= self.tolerance for err in self.max_errors.values())


def write_examples(out_dir, tol: Tolerances = DEFAULT_TOLERANCES, workers: int = 1,
                   names: Sequence[str] = (), steps: int = 100) -> ExamplesSummary:
    """Write one <name>.csv per sweep and the reference sidecar into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sidecar: Dict[str, object] = {"tolerance": REFERENCE_TOLERANCE, "sweeps": {}}
    summary = ExamplesSummary({})
    for sweep in sweeps(steps):
        if names and sweep.name not in names:
            continue
        result = run_sweep(sweep, tol, workers)
        with open(out / f"{sweep.name}.csv", "w", encoding="utf-8", newline="") as stream:
            write_branch_csv(stream, result.branches)
        summary.max_errors[sweep.name] = result.max_error
        sidecar["sweeps"][sweep.name] = {
            "label": sweep.label,
            "description": sweep.description,
            "max_error": result.max_error,
            "rows": result.rows,
        }
    sidecar["passed"] = summary.passed
    (out / SIDECAR_NAME).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    return summary

