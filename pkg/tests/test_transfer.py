"""
Unit tests for transfer matrices, initial value problems and the fundamental
solution pair.
"""

import numpy as np
import pytest

from src.models import ErrorCode, SLPError
from src.slp_core import SLEquation
from src.transfer import (
    build_transfer,
    closed_form_leading_terms,
    equation_residual,
    fundamental_pair,
    leading_terms,
    solve_ivp,
    transfer_for,
)


def fourier_phi(lam: complex) -> np.ndarray:
    return np.array([[1 - lam, 2 - lam], [lam ** 2 - 2 * lam, lam ** 2 - 3 * lam + 1]])


@pytest.mark.unit
class TestTransferSystem:
    """Test the symbolic transfer recursion."""

    @pytest.mark.parametrize("lam", [0.0, 1.0, -2.5, 0.3 + 0.7j])
    def test_fourier_phi(self, fourier, lam):
        ts = build_transfer(fourier)
        assert np.allclose(ts.evaluate(lam), fourier_phi(lam))

    def test_phi_zero_is_identity(self, fourier):
        ts = build_transfer(fourier)
        assert np.allclose(ts.evaluate(3.0, n=0), np.eye(2))

    def test_polynomial_degrees(self, random_equation):
        """Phi_N entries have degrees N-1, N-1, N, N."""
        eq = random_equation(5)
        phi = build_transfer(eq).polynomial_matrix()
        degrees = [[phi[i][j].numeric_degree() for j in range(2)] for i in range(2)]
        assert degrees == [[4, 4], [5, 5]]

    def test_determinant_is_one(self, random_equation):
        ts = build_transfer(random_equation(6))
        det = ts.determinant()
        assert det.coefficient(0) == pytest.approx(1.0)
        assert np.max(np.abs(det.coeffs[1:])) < 1e-9 * ts.coefficient_scale() ** 2

    def test_derivative_at(self, fourier):
        ts = build_transfer(fourier)
        expected = np.array([[-1.0, -1.0], [2 * 0.5 - 2, 2 * 0.5 - 3]])
        assert np.allclose(ts.derivative_at(0.5), expected)
        assert np.allclose(ts.derivative_at(0.5, order=3), np.zeros((2, 2)))

    def test_leading_terms_match_closed_form(self, random_equation):
        for n in (2, 3, 7):
            eq = random_equation(n)
            computed = leading_terms(build_transfer(eq)).as_array()
            expected = closed_form_leading_terms(eq).as_array()
            assert np.allclose(computed, expected, rtol=1e-10)

    @pytest.mark.slow
    def test_transfer_identities_on_random_equations(self, rng):
        """det Phi_N = 1 identically and the leading terms follow the closed forms."""
        for _ in range(200):
            n = int(rng.integers(2, 13))
            f = rng.uniform(0.1, 5.0, n + 1) * rng.choice([-1.0, 1.0], n + 1)
            q = rng.uniform(-5.0, 5.0, n)
            w = rng.uniform(0.1, 5.0, n) * rng.choice([-1.0, 1.0], n)
            ts = build_transfer(SLEquation.create(f, q, w))
            det = ts.determinant().coeffs
            identity = np.zeros(det.size)
            identity[0] = 1.0
            assert np.max(np.abs(det - identity)) <= 1e-9 * ts.coefficient_scale() ** 2
            computed = leading_terms(ts).as_array()
            expected = closed_form_leading_terms(ts.eq).as_array()
            assert np.allclose(computed, expected, rtol=1e-9, atol=0.0)

    def test_fourier_leading_terms(self, fourier):
        terms = leading_terms(build_transfer(fourier))
        assert (terms.phi, terms.psi, terms.qd_phi, terms.qd_psi) == pytest.approx((-1, -1, 1, 1))

    def test_transfer_for_is_cached(self, fourier):
        assert transfer_for(fourier) is transfer_for(fourier)


@pytest.mark.unit
class TestInitialValueProblems:
    """Test solve_ivp and the fundamental pair."""

    @pytest.mark.parametrize("m", [0, 2, 4])
    def test_solution_satisfies_equation(self, random_equation, m):
        eq = random_equation(4)
        lam = 0.7 - 0.2j
        seq = solve_ivp(eq, lam, m, 1.5, -0.5j)
        assert seq.y[m] == pytest.approx(1.5)
        assert seq.qd[m] == pytest.approx(-0.5j)
        assert np.max(np.abs(equation_residual(eq, lam, seq))) < 1e-10

    def test_forward_and_backward_agree(self, random_equation):
        eq = random_equation(5)
        forward = solve_ivp(eq, 1.1, 0, 0.3, 0.8)
        backward = solve_ivp(eq, 1.1, 3, forward.y[3], forward.qd[3])
        assert np.allclose(forward.y, backward.y)
        assert np.allclose(forward.qd, backward.qd)

    def test_index_out_of_range(self, fourier):
        with pytest.raises(SLPError) as exc_info:
            solve_ivp(fourier, 0.0, 3, 1.0, 0.0)
        assert exc_info.value.code is ErrorCode.PARAM_OUT_OF_RANGE

    def test_fundamental_pair_columns_of_phi(self, fourier):
        lam = 0.4
        pair = fundamental_pair(fourier, lam)
        phi = fourier_phi(lam)
        end_phi = pair.phi_seq.boundary_values()
        end_psi = pair.psi_seq.boundary_values()
        assert end_phi[:2] == pytest.approx([1.0, 0.0])
        assert end_psi[:2] == pytest.approx([0.0, 1.0])
        assert end_phi[2:] == pytest.approx(phi[:, 0])
        assert end_psi[2:] == pytest.approx(phi[:, 1])

    def test_negative_f(self):
        eq = SLEquation.create([-1.0, 2.0, -0.5, 1.0], [0.1, 0.0, -0.3], [1.0, 1.0, 2.0])
        seq = solve_ivp(eq, -0.25, 1, 1.0, 1.0)
        assert np.max(np.abs(equation_residual(eq, -0.25, seq))) < 1e-12
