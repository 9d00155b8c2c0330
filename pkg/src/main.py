"""
Command-line entry point.

    python -m src.main eigs problem.json [--oracle]
    python -m src.main branch family.json --out branch.csv
    python -m src.main classify problem.json
    python -m src.main derivative problem.json --lambda 0.5,0 --tangent '{"h": [...], ...}'
    python -m src.main examples --out-dir out/
    python -m src.main oracle-compare problem.json

Exit codes: 0 ok, 1 internal failure, 2 validation error, 3 oracle or
reference mismatch, 4 branch matching ambiguity.
"""

import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from src.bc_space import (
    BCClass,
    BCTangent,
    classify,
    coupled_params,
    is_self_adjoint,
    normalize_to_chart,
    self_adjoint_chart,
    separated_params,
)
from src.config import load_settings
from src.logging_config import LogContext, get_logger, setup_logging
from src.models import VALIDATION_CODES, ErrorCode, SLPError
from src.parser import ProblemParser, encode_complex, spectrum_csv, spectrum_payload, write_branch_csv
from src.perturbation import (
    EquationTangent,
    bc_derivative,
    branch_trace,
    branch_trace_group,
    equation_derivative,
    self_adjoint_bc_derivative,
    separated_derivatives,
)
from src.slp_core import Tolerances
from src.spectrum import (
    eigenvalues,
    is_self_adjoint_problem,
    oracle_discrepancy,
    pencil_oracle,
    self_adjoint_count,
)
from src.sweeps import SIDECAR_NAME, SWEEP_NAMES, write_examples

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_MISMATCH = 3
EXIT_AMBIGUITY = 4

# Agreement required between the transfer-matrix spectrum and the pencil oracle.
ORACLE_TOLERANCE = 1e-7

logger = get_logger(__name__)


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        prog="dslp",
        description="Spectral analysis of discrete Sturm-Liouville problems",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s eigs tests/fixtures/neumann.json --oracle
  %(prog)s branch tests/fixtures/alpha_family.json --out alpha.csv
  %(prog)s examples --out-dir sweeps/
        """,
    )
    parser.add_argument("--tol", type=float, default=None,
                        help="Scale every numeric tolerance by this factor (default: DSLP_TOL_SCALE or 1)")
    parser.add_argument("--format", choices=("json", "csv"), default="json", dest="output_format",
                        help="Output format for eigs (default: json)")
    parser.add_argument("--workers", type=int, default=None,
                        help="Threads for branch grid evaluation (default: DSLP_WORKERS or 1)")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")

    sub = parser.add_subparsers(dest="command", required=True)

    eigs = sub.add_parser("eigs", help="Eigenvalues with multiplicities")
    eigs.add_argument("file")
    eigs.add_argument("--oracle", action="store_true", help="Cross-check with the pencil oracle")

    branch = sub.add_parser("branch", help="Trace eigenvalue branches of a family")
    branch.add_argument("file")
    branch.add_argument("--out", required=True, help="CSV output path")

    classify_cmd = sub.add_parser("classify", help="Classify the boundary condition")
    classify_cmd.add_argument("file")

    derivative = sub.add_parser("derivative", help="Derivative of a simple eigenvalue")
    derivative.add_argument("file")
    derivative.add_argument("--lambda", dest="lam", required=True, help="Eigenvalue as re[,im]")
    derivative.add_argument("--tangent", default=None,
                            help='Inline JSON: {"chart", "H", "L"} / {"chart", "dcoords"} / {"h", "k", "l"}')
    derivative.add_argument("--formula", default="auto",
                            choices=("auto", "general", "self_adjoint", "separated", "equation"))

    examples = sub.add_parser("examples", help="Regenerate the reference branch sweeps")
    examples.add_argument("--out-dir", required=True)
    examples.add_argument("--only", nargs="*", default=(), choices=SWEEP_NAMES,
                          help="Restrict to some sweeps")

    oracle = sub.add_parser("oracle-compare", help="Compare against the pencil oracle")
    oracle.add_argument("file")

    return parser.parse_args(argv)


def parse_lambda(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    if not 1 <= len(parts) <= 2:
        raise SLPError(
            code=ErrorCode.VALIDATION_ERROR,
            message="--lambda expects re or re,im",
            details={"value": text},
        )
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise SLPError(
            code=ErrorCode.VALIDATION_ERROR,
            message="--lambda expects numbers",
            details={"value": text},
        ) from exc
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


def emit(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2))


def _oracle_tolerance(tol_scale: float) -> float:
    return ORACLE_TOLERANCE * tol_scale


# ============================================================================
# Commands
# ============================================================================

def cmd_eigs(args: argparse.Namespace, tol: Tolerances, tol_scale: float) -> int:
    problem = ProblemParser().load(args.file)
    with LogContext(logger, "Computing spectrum", n_points=problem.eq.N):
        report = eigenvalues(problem.eq, problem.bc, tol)
    comparison = None
    if args.oracle:
        comparison = oracle_discrepancy(report, pencil_oracle(problem.eq, problem.bc, tol), tol)

    if args.output_format == "csv":
        sys.stdout.write(spectrum_csv(report))
    else:
        emit(spectrum_payload(report, comparison))

    if comparison is not None and not comparison.within(_oracle_tolerance(tol_scale)):
        raise SLPError(
            code=ErrorCode.ORACLE_MISMATCH,
            message="pencil oracle disagrees with the transfer-matrix spectrum",
            details={"coefficient_error": comparison.coefficient_error,
                     "root_error": comparison.root_error},
        )
    return EXIT_OK


def cmd_oracle_compare(args: argparse.Namespace, tol: Tolerances, tol_scale: float) -> int:
    problem = ProblemParser().load(args.file)
    report = eigenvalues(problem.eq, problem.bc, tol)
    oracle = pencil_oracle(problem.eq, problem.bc, tol)
    comparison = oracle_discrepancy(report, oracle, tol)
    limit = _oracle_tolerance(tol_scale)
    emit({
        "transfer": report.to_dict(),
        "oracle": oracle.to_dict(),
        "coefficient_error": comparison.coefficient_error,
        "root_error": comparison.root_error,
        "tolerance": limit,
        "agree": comparison.within(limit),
    })
    return EXIT_OK if comparison.within(limit) else EXIT_MISMATCH


def cmd_branch(args: argparse.Namespace, tol: Tolerances, workers: int) -> int:
    loaded = ProblemParser().load_family(args.file)
    try:
        if loaded.group:
            branches = branch_trace_group(loaded.family, loaded.starts, tol, workers)
        else:
            branches = branch_trace(loaded.family, loaded.starts[0], tol, workers)
    except SLPError as err:
        if err.code is not ErrorCode.MATCH_AMBIGUITY:
            raise
        partial = err.details.pop("branches", [])
        with open(args.out, "w", encoding="utf-8", newline="") as stream:
            rows = write_branch_csv(stream, partial,
                                    marker=f"MATCH_AMBIGUITY param={err.details['param']:.17g}")
        err.details.update({"out": args.out, "rows": rows})
        raise
    with open(args.out, "w", encoding="utf-8", newline="") as stream:
        rows = write_branch_csv(stream, branches)
    emit({"out": args.out, "branches": len(branches), "rows": rows})
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, tol: Tolerances) -> int:
    problem = ProblemParser().load(args.file)
    bc, eq = problem.bc, problem.eq
    kind = classify(bc, tol)
    point = normalize_to_chart(bc, tol)
    payload: Dict[str, Any] = {
        "class": kind.value,
        "self_adjoint": is_self_adjoint(bc, tol),
        "equation_class": eq.eq_class.value,
        "chart": {"id": point.chart_id.value, "coords": [encode_complex(c) for c in point.coords]},
    }
    if payload["self_adjoint"]:
        sa_point = self_adjoint_chart(bc, tol)
        payload["self_adjoint_chart"] = {"id": sa_point.chart_id.value,
                                         "coords": [float(c) for c in sa_point.coords]}
        if kind is BCClass.SEPARATED:
            params = separated_params(bc, tol)
            payload["params"] = {"alpha": params.alpha, "beta": params.beta}
        elif kind is BCClass.COUPLED:
            params = coupled_params(bc, tol)
            payload["params"] = {"gamma": params.gamma, "K": params.K.tolist()}
        if eq.is_real_positive_weight:
            count = self_adjoint_count(eq, bc, tol)
            payload["count"] = {"r": count.r, "kappa": encode_complex(count.kappa),
                                "expected_total": count.expected_total}
    emit(payload)
    return EXIT_OK


def _pick_formula(requested: str, tangent, problem, tol: Tolerances) -> str:
    if requested != "auto":
        return requested
    if tangent is None:
        return "separated"
    if isinstance(tangent, EquationTangent):
        return "equation"
    if tangent.chart_id.is_self_adjoint_chart and is_self_adjoint_problem(problem.eq, problem.bc, tol):
        return "self_adjoint"
    return "general"


def cmd_derivative(args: argparse.Namespace, tol: Tolerances) -> int:
    parser = ProblemParser()
    problem = parser.load(args.file)
    lam = parse_lambda(args.lam)
    tangent = parser.parse_tangent(args.tangent) if args.tangent else None
    formula = _pick_formula(args.formula, tangent, problem, tol)
    payload: Dict[str, Any] = {"lambda": [lam.real, lam.imag], "formula": formula}

    if formula == "separated":
        d_alpha, d_beta = separated_derivatives(problem.eq, problem.bc, lam, tol)
        payload.update({"d_alpha": d_alpha, "d_beta": d_beta})
        emit(payload)
        return EXIT_OK

    expected = EquationTangent if formula == "equation" else BCTangent
    if not isinstance(tangent, expected):
        raise SLPError(
            code=ErrorCode.CHART_TANGENT_MISMATCH,
            message=f"formula '{formula}' needs a {expected.__name__} payload",
        )
    if formula == "equation":
        value = complex(equation_derivative(problem.eq, problem.bc, lam, tangent, tol))
    elif formula == "self_adjoint":
        value = complex(self_adjoint_bc_derivative(problem.eq, problem.bc, lam, tangent, tol))
    else:
        value = bc_derivative(problem.eq, problem.bc, lam, tangent, tol)
    payload["value"] = [value.real, value.imag]
    emit(payload)
    return EXIT_OK


def cmd_examples(args: argparse.Namespace, tol: Tolerances, workers: int) -> int:
    summary = write_examples(args.out_dir, tol, workers, names=tuple(args.only))
    emit({
        "out_dir": args.out_dir,
        "sidecar": SIDECAR_NAME,
        "max_errors": summary.max_errors,
        "passed": summary.passed,
    })
    return EXIT_OK if summary.passed else EXIT_MISMATCH


def exit_code_for(err: SLPError) -> int:
    if err.code in VALIDATION_CODES:
        return EXIT_VALIDATION
    if err.code is ErrorCode.ORACLE_MISMATCH:
        return EXIT_MISMATCH
    if err.code is ErrorCode.MATCH_AMBIGUITY:
        return EXIT_AMBIGUITY
    return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main application entry point.

    Returns:
        Exit code (see module docstring)
    """
    args = parse_arguments(argv)
    try:
        settings = load_settings()
        setup_logging(
            log_level=args.log_level or settings.log_level,
            log_dir=settings.log_dir,
            enable_console=True,
            enable_file=settings.log_to_file,
            json_format=settings.json_logs,
        )
        tol_scale = settings.tol_scale if args.tol is None else args.tol
        tol = settings.tolerances(tol_scale)
        workers = settings.workers if args.workers is None else max(1, args.workers)
        logger.debug(f"Command {args.command}: tol scale {tol_scale}, workers {workers}")

        if args.command == "eigs":
            return cmd_eigs(args, tol, tol_scale)
        if args.command == "oracle-compare":
            return cmd_oracle_compare(args, tol, tol_scale)
        if args.command == "branch":
            return cmd_branch(args, tol, workers)
        if args.command == "classify":
            return cmd_classify(args, tol)
        if args.command == "derivative":
            return cmd_derivative(args, tol)
        return cmd_examples(args, tol, workers)

    except SLPError as err:
        logger.error(f"{args.command} failed: {err}", extra={"code": err.code.value})
        print(json.dumps({"error": err.to_dict()}), file=sys.stderr)
        print(f"❌ {err}", file=sys.stderr)
        return exit_code_for(err)

    except OSError as err:
        logger.error(f"File error: {err}")
        print(json.dumps({"error": {"code": "IO_ERROR", "message": str(err), "details": {}}}),
              file=sys.stderr)
        print(f"❌ {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
