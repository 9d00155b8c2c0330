"""
Unit tests for the characteristic polynomial, eigenvalues with multiplicities,
eigenfunctions and the pencil oracle.
"""

import math

import numpy as np
import pytest

from src.bc_space import BoundaryCondition, ChartId, chart_coordinates, double_eigenvalue_bc
from src.models import ErrorCode, SLPError
from src.slp_core import ComplexPolynomial, SLEquation
from src.spectrum import (
    ORACLE_MAX_N,
    SpectrumKind,
    SpectrumReport,
    characteristic_polynomial,
    count_in_region,
    eigenfunction,
    eigenspace_basis,
    eigenvalues,
    geometric_multiplicity,
    oracle_discrepancy,
    pencil_determinant,
    pencil_matrices,
    pencil_oracle,
    polynomial_roots,
    require_eigenvalue,
    self_adjoint_count,
    simple_slope,
)
from src.sweeps import fourier_equation, indefinite_weight, indefinite_weight_bc, multiplicity_gap_bc
from src.transfer import equation_residual, transfer_for


def padded(poly: ComplexPolynomial, size: int) -> np.ndarray:
    return np.pad(poly.coeffs, (0, size - poly.coeffs.size))


def random_transform(rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) + 3 * np.eye(2)


def assert_same_spectrum(first: SpectrumReport, second: SpectrumReport) -> None:
    assert len(first.eigenvalues) == len(second.eigenvalues)
    for eig in first.eigenvalues:
        other = second.nearest(eig.value)
        assert abs(other.value - eig.value) <= 1e-7 * max(1.0, abs(eig.value))
        assert (other.analytic_mult, other.geometric_mult) == (eig.analytic_mult, eig.geometric_mult)


@pytest.mark.unit
class TestCharacteristicPolynomial:
    """Test Gamma and its cofactor expansion."""

    def test_dirichlet(self, fourier, dirichlet_bc):
        char_poly = characteristic_polynomial(fourier, dirichlet_bc)
        gamma = char_poly.gamma.trimmed()
        assert gamma.coeffs.size == 2
        assert -gamma.coeffs[0] / gamma.coeffs[1] == pytest.approx(2.0)
        assert char_poly.degree() == 1

    def test_two_formulas_agree(self, rng, random_equation):
        eq = random_equation(6)
        bc = BoundaryCondition.from_matrix(rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4)))
        char_poly = characteristic_polynomial(eq, bc)
        size = max(char_poly.gamma.coeffs.size, char_poly.via_expansion.coeffs.size)
        diff = padded(char_poly.gamma, size) - padded(char_poly.via_expansion, size)
        assert np.max(np.abs(diff)) <= 1e-9 * char_poly.scale

    def test_degree_never_exceeds_n(self, rng, random_complex_problem):
        for _ in range(50):
            eq, bc = random_complex_problem(int(rng.integers(2, 9)))
            char_poly = characteristic_polynomial(eq, bc)
            assert char_poly.gamma.coeffs.size <= eq.N + 1
            assert char_poly.via_expansion.coeffs.size <= eq.N + 1

    def test_constant_for_initial_value_condition(self, fourier):
        char_poly = characteristic_polynomial(fourier, BoundaryCondition(np.eye(2), np.zeros((2, 2))))
        assert char_poly.degree() == 0
        assert char_poly.gamma.coefficient(0) == pytest.approx(1.0)

    def test_whole_plane(self, load_problem):
        problem = load_problem("whole_plane")
        assert characteristic_polynomial(problem.eq, problem.bc).is_whole_plane()

    def test_scale_is_quadratic_in_representative(self, rng, random_equation, load_problem):
        """Gamma and its scale both pick up t^2 when (A|B) is multiplied by t."""
        eq = random_equation(5)
        bc = BoundaryCondition.from_matrix(rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4)))
        for t in (1e-6, 7.5, 1e5):
            base = characteristic_polynomial(eq, bc)
            scaled = characteristic_polynomial(eq, bc.transformed(t * np.eye(2)))
            assert scaled.scale == pytest.approx(t ** 2 * base.scale, rel=1e-12)
            assert scaled.gamma.coeffs.size == base.gamma.coeffs.size
            assert np.max(np.abs(scaled.gamma.coeffs - t ** 2 * base.gamma.coeffs)) <= 1e-12 * scaled.scale
            assert not scaled.is_whole_plane()

        problem = load_problem("whole_plane")
        for t in (1e-6, 1e5):
            assert characteristic_polynomial(problem.eq, problem.bc.transformed(t * np.eye(2))).is_whole_plane()

    @pytest.mark.parametrize("c", [
        0.0, 1.0, -1.0, 2.0, -0.5, 0.5j, -2 + 0.5j, 3 - 1j, -1 - 1j, -1 + 1j,
    ])
    def test_multiplicity_gap_family(self, c):
        """Gamma = (c^2 + 2c + 2) lam - (c + 1) lam^2 on the Fourier equation."""
        char_poly = characteristic_polynomial(fourier_equation(), multiplicity_gap_bc(c))
        expected = np.array([0.0, c * c + 2 * c + 2, -(c + 1)], dtype=complex)
        assert np.allclose(padded(char_poly.gamma, 3), expected, rtol=0.0, atol=1e-12)

        report = eigenvalues(fourier_equation(), multiplicity_gap_bc(c))
        assert report.total_multiplicity == (1 if c == -1.0 else 2)
        if abs(c * c + 2 * c + 2) < 1e-12:
            assert [(e.analytic_mult, e.geometric_mult) for e in report.eigenvalues] == [(2, 1)]

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 1.2, 2.0, 2.5])
    def test_indefinite_weight_family(self, alpha):
        """The weight cancels the linear term: Gamma = s w (c - s) lam^2."""
        w2 = indefinite_weight(alpha)
        c, s = math.cos(alpha), math.sin(alpha)
        char_poly = characteristic_polynomial(fourier_equation(w2), indefinite_weight_bc(alpha))
        expected = np.array([0.0, 0.0, s * w2 * (c - s)], dtype=complex)
        assert np.allclose(padded(char_poly.gamma, 3), expected, rtol=0.0, atol=1e-12 * char_poly.scale)
        assert char_poly.degree() == 2


@pytest.mark.unit
class TestEigenvalues:
    """Test eigenvalues and multiplicities on problems with known spectra."""

    @pytest.mark.parametrize("name,expected", [
        ("dirichlet", [2.0]),
        ("neumann", [0.0, 2.0]),
        ("periodic", [0.0, 4.0]),
        ("multiplicity_gap", [0.0, 2.5]),
    ])
    def test_simple_spectra(self, load_problem, name, expected):
        problem = load_problem(name)
        report = eigenvalues(problem.eq, problem.bc)
        assert report.kind is SpectrumKind.FINITE
        assert report.self_adjoint
        assert [e.value for e in report.eigenvalues] == pytest.approx(expected, abs=1e-10)
        assert all(e.value.imag == 0.0 for e in report.eigenvalues)
        assert all(e.analytic_mult == 1 and e.geometric_mult == 1 for e in report.eigenvalues)

    def test_double_eigenvalue_with_two_eigenfunctions(self, load_problem):
        problem = load_problem("antiperiodic")
        report = eigenvalues(problem.eq, problem.bc)
        assert len(report.eigenvalues) == 1
        only = report.eigenvalues[0]
        assert only.value == pytest.approx(2.0, abs=1e-6)
        assert (only.analytic_mult, only.geometric_mult) == (2, 2)
        assert only.certified
        assert report.values(expanded=True) == pytest.approx([only.value, only.value])

    def test_double_eigenvalue_with_one_eigenfunction(self, fourier):
        """At c = -1 - i the gap condition has Gamma = i lam^2."""
        c = -1.0 - 1.0j
        bc = BoundaryCondition.from_matrix([[c, 2 * c + 1, 0, 0], [0, 0, c, 1]])
        report = eigenvalues(fourier, bc)
        assert len(report.eigenvalues) == 1
        only = report.eigenvalues[0]
        assert abs(only.value) < 1e-6
        assert (only.analytic_mult, only.geometric_mult) == (2, 1)

    def test_empty_spectrum(self, load_problem):
        problem = load_problem("empty_spectrum")
        report = eigenvalues(problem.eq, problem.bc)
        assert report.kind is SpectrumKind.FINITE
        assert report.eigenvalues == ()
        assert report.total_multiplicity == 0
        with pytest.raises(SLPError) as exc_info:
            report.nearest(0.0)
        assert exc_info.value.code is ErrorCode.NOT_AN_EIGENVALUE

    def test_whole_plane_spectrum(self, load_problem):
        problem = load_problem("whole_plane")
        report = eigenvalues(problem.eq, problem.bc)
        assert report.kind is SpectrumKind.WHOLE_PLANE
        assert report.to_dict()["kind"] == "whole_plane"
        with pytest.raises(SLPError) as exc_info:
            count_in_region(report, 0.0, 1.0)
        assert exc_info.value.code is ErrorCode.WHOLE_PLANE_SPECTRUM

    def test_sorted_by_real_part(self, load_problem):
        problem = load_problem("complex_coupled")
        values = [e.value for e in eigenvalues(problem.eq, problem.bc).eigenvalues]
        assert values == sorted(values, key=lambda v: (v.real, v.imag))

    def test_count_in_region(self, load_problem):
        problem = load_problem("periodic")
        report = eigenvalues(problem.eq, problem.bc)
        assert count_in_region(report, 2.0, 2.5) == 2
        assert count_in_region(report, 2.0, 1.0) == 0
        assert count_in_region(report, 4.0, 0.1) == 1

    @pytest.mark.slow
    def test_self_adjoint_count_law(self, rng, random_equation, random_self_adjoint_bc):
        """Real spectrum, equal multiplicities and N - 2 + r eigenvalues."""
        for _ in range(300):
            eq = random_equation(int(rng.integers(2, 9)))
            bc = random_self_adjoint_bc()
            report = eigenvalues(eq, bc)
            assert report.self_adjoint
            assert report.total_multiplicity == self_adjoint_count(eq, bc).expected_total
            for eig in report.eigenvalues:
                assert abs(eig.value.imag) <= 1e-7 * max(1.0, abs(eig.value))
                assert eig.analytic_mult == eig.geometric_mult

    @pytest.mark.slow
    def test_analytic_multiplicity_bounds_geometric(self, rng, random_equation, random_complex_problem):
        """Every third problem uses the condition that doubles a chosen eigenvalue."""
        doubled = 0
        for i in range(300):
            if i % 3:
                eq, bc = random_complex_problem(int(rng.integers(2, 9)))
            else:
                eq = random_equation(int(rng.integers(2, 6)))
                lam = float(rng.uniform(-1.0, 2.0))
                bc = double_eigenvalue_bc(transfer_for(eq), lam)
                assert eigenvalues(eq, bc).nearest(lam).geometric_mult == 2
                doubled += 1
            for eig in eigenvalues(eq, bc).eigenvalues:
                assert eig.analytic_mult >= eig.geometric_mult >= 1
        assert doubled == 100

    def test_separated_conditions_give_simple_eigenvalues(self, rng, random_equation, random_self_adjoint_bc):
        for _ in range(100):
            eq = random_equation(int(rng.integers(2, 9)))
            bc = random_self_adjoint_bc("separated")
            report = eigenvalues(eq, bc)
            assert report.total_multiplicity == self_adjoint_count(eq, bc).expected_total
            assert all((e.analytic_mult, e.geometric_mult) == (1, 1) for e in report.eigenvalues)

    def test_spectrum_ignores_representative(self, rng, random_equation, random_self_adjoint_bc,
                                             random_complex_problem):
        for i in range(100):
            n = int(rng.integers(2, 7))
            if i % 2:
                eq, bc = random_complex_problem(n)
            else:
                eq, bc = random_equation(n), random_self_adjoint_bc()
            assert_same_spectrum(eigenvalues(eq, bc), eigenvalues(eq, bc.transformed(random_transform(rng))))

    @pytest.mark.parametrize("name,r", [("dirichlet", 1), ("neumann", 2), ("periodic", 2), ("antiperiodic", 2)])
    def test_self_adjoint_count(self, load_problem, name, r):
        problem = load_problem(name)
        count = self_adjoint_count(problem.eq, problem.bc)
        assert count.r == r
        assert count.expected_total == problem.eq.N - 2 + r

    def test_self_adjoint_count_needs_self_adjoint_problem(self, load_problem):
        problem = load_problem("complex_coupled")
        with pytest.raises(SLPError) as exc_info:
            self_adjoint_count(problem.eq, problem.bc)
        assert exc_info.value.code is ErrorCode.NOT_SELF_ADJOINT

    def test_polynomial_roots_of_constant(self):
        assert polynomial_roots(ComplexPolynomial.constant(3.0)) == ([], True)

    def test_polynomial_roots_cluster(self):
        roots, converged = polynomial_roots(ComplexPolynomial(np.array([-2.0, 5.0, -4.0, 1.0])))
        assert converged
        values = {round(v.real, 6): mult for v, mult, _ in roots}
        assert values == {1.0: 2, 2.0: 1}


@pytest.mark.unit
class TestEigenvalueChecks:
    """Test eigenvalue acceptance, simplicity and geometric multiplicity."""

    def test_require_eigenvalue(self, fourier, dirichlet_bc):
        char_poly = characteristic_polynomial(fourier, dirichlet_bc)
        require_eigenvalue(char_poly, 2.0)
        with pytest.raises(SLPError) as exc_info:
            require_eigenvalue(char_poly, 1.5)
        assert exc_info.value.code is ErrorCode.NOT_AN_EIGENVALUE

    def test_simple_slope(self, fourier, neumann_bc):
        char_poly = characteristic_polynomial(fourier, neumann_bc)
        assert abs(simple_slope(char_poly, 2.0)) > 0

    def test_double_root_is_not_simple(self, load_problem):
        problem = load_problem("antiperiodic")
        char_poly = characteristic_polynomial(problem.eq, problem.bc)
        with pytest.raises(SLPError) as exc_info:
            simple_slope(char_poly, 2.0)
        assert exc_info.value.code is ErrorCode.NOT_SIMPLE

    def test_double_eigenvalue_condition(self, random_equation):
        eq = random_equation(4)
        bc = double_eigenvalue_bc(transfer_for(eq), 0.7)
        assert geometric_multiplicity(eq, bc, 0.7) == 2
        report = eigenvalues(eq, bc)
        assert report.nearest(0.7).geometric_mult == 2

    def test_double_eigenvalue_condition_is_unique(self, rng, random_equation):
        """Only [Phi_N(lam) | -I] has two eigenfunctions at lam; rank-one M leaves one."""
        for _ in range(50):
            eq = random_equation(int(rng.integers(2, 7)))
            lam = float(rng.uniform(-1.0, 2.0))
            ts = transfer_for(eq)
            phi = ts.evaluate(lam)
            double = double_eigenvalue_bc(ts, lam)
            assert geometric_multiplicity(eq, double, lam) == 2

            b = random_transform(rng)
            same = BoundaryCondition(-b @ phi, b)
            assert chart_coordinates(same, ChartId.N34).distance(chart_coordinates(double, ChartId.N34)) < 1e-9

            u, v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            other = BoundaryCondition(np.outer(u, v) - b @ phi, b)
            assert geometric_multiplicity(eq, other, lam) == 1

    def test_geometric_multiplicity_simple(self, fourier, dirichlet_bc):
        assert geometric_multiplicity(fourier, dirichlet_bc, 2.0) == 1

    def test_geometric_multiplicity_matches_analytic_when_self_adjoint(
            self, rng, random_equation, random_self_adjoint_bc):
        """Reported geometric multiplicities come from the rank of A + B Phi_N."""
        seen = set()
        for i in range(100):
            eq = random_equation(int(rng.integers(2, 6)))
            if i % 4:
                bc = random_self_adjoint_bc()
            else:
                bc = double_eigenvalue_bc(transfer_for(eq), float(rng.uniform(-1.0, 2.0)))
            for eig in eigenvalues(eq, bc).eigenvalues:
                assert eig.geometric_mult == eig.analytic_mult
                assert geometric_multiplicity(eq, bc, eig.value) == eig.geometric_mult
                seen.add(eig.geometric_mult)
        assert seen == {1, 2}


@pytest.mark.unit
class TestEigenfunctions:
    """Test eigenfunction construction."""

    def test_dirichlet_eigenfunction(self, fourier, dirichlet_bc):
        data = eigenfunction(fourier, dirichlet_bc, 2.0)
        assert data.normalized
        assert data.seq.y[:3] == pytest.approx([0.0, 1.0, 0.0], abs=1e-12)
        assert data.seq.weighted_norm_squared(fourier.w.real) == pytest.approx(1.0)

    def test_eigenfunction_solves_problem(self, load_problem):
        problem = load_problem("complex_coupled")
        report = eigenvalues(problem.eq, problem.bc)
        for eig in report.eigenvalues:
            data = eigenfunction(problem.eq, problem.bc, eig.value)
            assert not data.normalized
            scale = np.max(np.abs(data.seq.y))
            assert np.max(np.abs(problem.bc.residual(data.seq))) < 1e-7 * scale
            assert np.max(np.abs(equation_residual(problem.eq, eig.value, data.seq))) < 1e-9 * scale

    @pytest.mark.slow
    def test_every_reported_eigenvalue_has_eigenfunctions(self, rng, random_equation, random_self_adjoint_bc,
                                                         random_complex_problem):
        """Roots returned by eigenvalues() pass the eigenvalue check downstream."""
        for i in range(100):
            n = int(rng.integers(2, 9))
            if i % 2:
                eq, bc = random_complex_problem(n)
            else:
                eq, bc = random_equation(n), random_self_adjoint_bc()
            report = eigenvalues(eq, bc)
            for eig in report.eigenvalues:
                require_eigenvalue(report.char_poly, eig.value)
                basis = eigenspace_basis(eq, bc, eig.value)
                assert len(basis) == eig.geometric_mult
                for seq in basis:
                    scale = np.max(np.abs(seq.y)) * bc.scale
                    assert np.max(np.abs(bc.residual(seq))) <= 1e-6 * scale

    def test_eigenfunction_rejects_two_dimensional_eigenspace(self, load_problem):
        problem = load_problem("antiperiodic")
        with pytest.raises(SLPError) as exc_info:
            eigenfunction(problem.eq, problem.bc, 2.0)
        assert exc_info.value.code is ErrorCode.GEOMETRIC_MULTIPLICITY_TWO
        basis = eigenspace_basis(problem.eq, problem.bc, 2.0)
        assert len(basis) == 2
        for seq in basis:
            assert np.max(np.abs(problem.bc.residual(seq))) < 1e-9

    def test_eigenspace_basis_simple(self, fourier, neumann_bc):
        assert len(eigenspace_basis(fourier, neumann_bc, 0.0)) == 1

    def test_not_an_eigenvalue(self, fourier, dirichlet_bc):
        with pytest.raises(SLPError) as exc_info:
            eigenfunction(fourier, dirichlet_bc, 0.5)
        assert exc_info.value.code is ErrorCode.NOT_AN_EIGENVALUE


@pytest.mark.unit
class TestPencilOracle:
    """Test the independent linear-pencil spectrum."""

    def test_pencil_shape(self, fourier, dirichlet_bc):
        m0, m1 = pencil_matrices(fourier, dirichlet_bc)
        assert m0.shape == m1.shape == (4, 4)

    def test_pencil_determinant_matches_dense_determinant(self, fourier, neumann_bc):
        m0, m1 = pencil_matrices(fourier, neumann_bc)
        det = pencil_determinant(fourier, neumann_bc)
        for lam in (0.3, -1.2, 0.5 + 0.5j):
            assert det(lam) == pytest.approx(np.linalg.det(m0 + lam * m1), abs=1e-10)

    @pytest.mark.parametrize("name", ["dirichlet", "neumann", "multiplicity_gap", "complex_coupled", "antiperiodic"])
    def test_oracle_agrees(self, load_problem, name):
        problem = load_problem(name)
        report = eigenvalues(problem.eq, problem.bc)
        oracle = pencil_oracle(problem.eq, problem.bc)
        comparison = oracle_discrepancy(report, oracle)
        assert comparison.within(1e-6)

    @pytest.mark.slow
    def test_oracle_agrees_on_random_problems(self, rng, random_complex_problem):
        for _ in range(100):
            eq, bc = random_complex_problem(int(rng.integers(2, 9)))
            comparison = oracle_discrepancy(eigenvalues(eq, bc), pencil_oracle(eq, bc))
            assert comparison.within(1e-7), comparison

    def test_oracle_whole_plane(self, load_problem):
        problem = load_problem("whole_plane")
        oracle = pencil_oracle(problem.eq, problem.bc)
        assert oracle.kind is SpectrumKind.WHOLE_PLANE
        comparison = oracle_discrepancy(eigenvalues(problem.eq, problem.bc), oracle)
        assert (comparison.coefficient_error, comparison.root_error) == (0.0, 0.0)

    def test_oracle_size_limit(self):
        n = ORACLE_MAX_N + 1
        eq = SLEquation.create(np.ones(n + 1), np.zeros(n), np.ones(n))
        with pytest.raises(SLPError) as exc_info:
            pencil_oracle(eq, BoundaryCondition(np.eye(2), -np.eye(2)))
        assert exc_info.value.code is ErrorCode.SIZE_LIMIT

    def test_kind_mismatch_is_infinite(self, load_problem):
        whole = load_problem("whole_plane")
        finite = load_problem("dirichlet")
        comparison = oracle_discrepancy(eigenvalues(whole.eq, whole.bc), pencil_oracle(finite.eq, finite.bc))
        assert comparison.root_error == math.inf
        assert not comparison.within(1.0)
