"""
Unit tests for the problem file parser and result serialization.

Tests schema validation, canonical output and the branch CSV format.
"""

import io
import json
import math

import numpy as np
import pytest

from src.bc_space import BCTangent, ChartId
from src.models import ErrorCode, SLPError
from src.parser import (
    CSV_HEADER,
    encode_complex,
    read_branch_csv,
    spectrum_csv,
    spectrum_payload,
    to_complex,
    write_branch_csv,
)
from src.perturbation import Branch, BranchSample, EquationTangent, FamilyTarget
from src.slp_core import EquationClass
from src.spectrum import OracleComparison, eigenvalues


def problem_text(**overrides) -> str:
    data = {
        "N": 2,
        "f": [1.0, 1.0, 1.0],
        "q": [0.0, 0.0],
        "w": [1.0, 1.0],
        "bc": {"kind": "separated", "alpha": 0.0, "beta": math.pi},
    }
    data.update(overrides)
    return json.dumps(data)


@pytest.mark.unit
class TestProblemParser:
    """Test parsing of problem files."""

    def test_parse_separated(self, parser):
        """Test that a separated problem parses into its canonical form."""
        problem = parser.parse(problem_text())
        assert problem.eq.N == 2
        assert problem.bc.A.tolist() == [[1.0, 0.0], [0.0, 0.0]]
        assert problem.bc_spec["kind"] == "separated"
        assert problem.declared_class is None

    def test_parse_complex_values(self, load_problem):
        """Test that [re, im] pairs become complex numbers."""
        problem = load_problem("complex_coupled")
        assert problem.eq.f[1] == complex(2.0, 0.5)
        assert problem.eq.w[2] == complex(1.0, 1.0)
        assert problem.bc.A[0, 1] == 1j
        assert problem.eq.eq_class is EquationClass.COMPLEX

    def test_parse_coupled(self, load_problem):
        problem = load_problem("periodic")
        assert np.allclose(problem.bc.A, np.eye(2))
        assert np.allclose(problem.bc.B, -np.eye(2))

    def test_declared_class(self, load_problem):
        assert load_problem("dirichlet").declared_class is EquationClass.REAL_POSITIVE_WEIGHT

    def test_zero_f_is_validation_error(self, load_problem):
        """Test that f_n = 0 reports the offending index."""
        with pytest.raises(SLPError) as exc_info:
            load_problem("zero_f")
        err = exc_info.value
        assert err.code is ErrorCode.VALIDATION_ERROR
        assert any("f" in v for v in err.details["violations"])

    def test_bad_lengths(self, load_problem):
        """Test that array lengths are checked against N."""
        with pytest.raises(SLPError) as exc_info:
            load_problem("bad_lengths")
        err = exc_info.value
        assert err.code is ErrorCode.VALIDATION_ERROR
        assert "f has 3 entries" in err.message

    def test_rank_one_condition(self, load_problem):
        with pytest.raises(SLPError) as exc_info:
            load_problem("rank_one_bc")
        assert exc_info.value.code is ErrorCode.NOT_RANK_2

    def test_separated_out_of_range(self, parser):
        with pytest.raises(SLPError) as exc_info:
            parser.parse(problem_text(bc={"kind": "separated", "alpha": 4.0, "beta": 1.0}))
        assert exc_info.value.code is ErrorCode.PARAM_OUT_OF_RANGE

    @pytest.mark.parametrize("text", [
        "not json",
        problem_text(N=1, f=[1.0, 1.0], q=[0.0], w=[1.0]),
        problem_text(bc={"kind": "robin", "alpha": 0.0}),
        problem_text(bc={"kind": "matrix", "A": [[1, 0]], "B": [[0, 0], [1, 0]]}),
        problem_text(extra=1),
    ])
    def test_schema_errors(self, parser, text):
        """Test that malformed files raise VALIDATION_ERROR with field paths."""
        with pytest.raises(SLPError) as exc_info:
            parser.parse(text, source="case.json")
        err = exc_info.value
        assert err.code is ErrorCode.VALIDATION_ERROR
        assert err.message.startswith("case.json: ")
        assert err.details["errors"]

    def test_dumps_is_canonical(self, parser, load_problem):
        """Test that dumping a parsed file reproduces the same problem."""
        problem = load_problem("complex_coupled")
        text = parser.dumps(problem)
        data = json.loads(text)
        assert list(data) == ["N", "f", "q", "w", "bc"]
        assert data["f"][1] == [2.0, 0.5]
        assert data["f"][0] == 1.0
        again = parser.parse(text)
        assert np.allclose(again.bc.matrix, problem.bc.matrix)
        assert parser.dumps(again) == text

    def test_dumps_keeps_class(self, parser, load_problem):
        data = json.loads(parser.dumps(load_problem("dirichlet")))
        assert data["class"] == "real_positive_weight"
        assert data["bc"] == {"kind": "separated", "alpha": 0.0, "beta": math.pi}

    def test_complex_helpers(self):
        assert to_complex([1.0, -2.0]) == complex(1.0, -2.0)
        assert to_complex(3.0) == 3.0
        assert encode_complex(2.0) == 2.0
        assert encode_complex(1 + 1j) == [1.0, 1.0]


@pytest.mark.unit
class TestFamilyFiles:
    """Test family files and inline tangents."""

    def test_single_start(self, parser, fixtures_dir):
        loaded = parser.load_family(fixtures_dir / "alpha_family.json")
        assert loaded.family.target is FamilyTarget.SEPARATED_ALPHA
        assert loaded.family.steps == 21
        assert loaded.starts == [2.0]
        assert not loaded.group

    def test_group_start(self, parser, fixtures_dir):
        loaded = parser.load_family(fixtures_dir / "crossing_family.json")
        assert loaded.family.chart is ChartId.O14
        assert loaded.family.index == 0
        assert loaded.starts == [-2.0, 0.0]
        assert loaded.group

    @pytest.mark.parametrize("starts", [{}, {"start_lambda": 1.0, "starts": [1.0]}, {"starts": []}])
    def test_exactly_one_start(self, parser, starts):
        data = json.loads(problem_text())
        data["family"] = {"target": "eq_q", "range": [0.0, 1.0], "steps": 3, "index": 1}
        data.update(starts)
        with pytest.raises(SLPError) as exc_info:
            parser.parse_family(json.dumps(data))
        assert exc_info.value.code is ErrorCode.VALIDATION_ERROR

    def test_family_with_equation_direction(self, parser):
        data = json.loads(problem_text())
        data["family"] = {"target": "eq_tangent", "range": [0.0, 0.1], "steps": 2,
                          "direction": {"h": [0, 0, 0], "k": [1, 0], "l": [0, 0]}}
        data["start_lambda"] = 2.0
        loaded = parser.parse_family(json.dumps(data))
        assert isinstance(loaded.family.direction, EquationTangent)

    def test_tangent_from_dcoords(self, parser):
        tangent = parser.parse_tangent('{"chart": "O14", "dcoords": [1, 0, 0, 0]}')
        assert isinstance(tangent, BCTangent)
        assert tangent.chart_id is ChartId.O14
        assert tangent.matrix[0, 1] == 1.0

    def test_tangent_from_matrices(self, parser):
        tangent = parser.parse_tangent('{"chart": "N12", "H": [[0, 0], [0, 0]], "L": [[1, [0, 1]], [0, 0]]}')
        assert tangent.L[0, 1] == 1j

    def test_equation_tangent(self, parser):
        tangent = parser.parse_tangent('{"h": [1, 0, 0], "k": [0, 0], "l": [0, 0]}')
        assert isinstance(tangent, EquationTangent)
        assert tangent.N == 2

    def test_bad_tangent(self, parser):
        with pytest.raises(SLPError) as exc_info:
            parser.parse_tangent('{"chart": "O14"}')
        assert exc_info.value.code is ErrorCode.VALIDATION_ERROR


@pytest.mark.unit
class TestOutputFormats:
    """Test spectrum payloads and the branch CSV."""

    def test_spectrum_payload(self, load_problem):
        problem = load_problem("neumann")
        report = eigenvalues(problem.eq, problem.bc)
        payload = spectrum_payload(report, OracleComparison(1e-12, 2e-12))
        assert payload["kind"] == "finite"
        assert len(payload["eigenvalues"]) == 2
        assert payload["oracle"] == {"coefficient_error": 1e-12, "root_error": 2e-12}
        json.dumps(payload)

    def test_spectrum_csv(self, load_problem):
        problem = load_problem("periodic")
        lines = spectrum_csv(eigenvalues(problem.eq, problem.bc)).splitlines()
        assert lines[0] == "index,lambda_re,lambda_im,analytic_mult,geometric_mult,certified"
        assert len(lines) == 3
        fields = lines[2].split(",")
        assert float(fields[1]) == pytest.approx(4.0)
        assert fields[3:] == ["1", "1", "true"]

    def test_branch_csv_rows_sorted(self):
        first = Branch(0, [BranchSample(0.5, 1 + 0j, 1, 1), BranchSample(0.0, 2 + 0j, 1, 1)])
        second = Branch(1, [BranchSample(0.0, 3 + 0.5j, 2, 1)])
        stream = io.StringIO()
        assert write_branch_csv(stream, [first, second], marker="MATCH_AMBIGUITY param=1") == 3
        text = stream.getvalue()
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert [line.split(",")[:2] for line in lines[1:4]] == [["0", "0"], ["0", "1"], ["0.5", "0"]]
        assert lines[-1] == "# MATCH_AMBIGUITY param=1"

        rows = read_branch_csv(io.StringIO(text))
        assert len(rows) == 3
        assert rows[1]["lam"] == 3 + 0.5j
        assert rows[1]["analytic_mult"] == 2

    def test_full_precision(self):
        value = 0.1 + 0.2
        stream = io.StringIO()
        write_branch_csv(stream, [Branch(0, [BranchSample(value, complex(value), 1, 1)])])
        row = read_branch_csv(io.StringIO(stream.getvalue()))[0]
        assert row["param"] == value
        assert row["lam"].real == value
