"""
Pytest configuration and shared fixtures for the spectral toolkit test suite.

Problem files live in ``tests/fixtures``; the small N = 2 problems there have
closed-form spectra that the tests check against.
"""

import math
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pytest

from src.bc_space import BoundaryCondition, CoupledParams, SeparatedParams, canonical_bc, separated_bc
from src.parser import Problem, ProblemParser
from src.slp_core import SLEquation


@pytest.fixture
def fixtures_dir() -> Path:
    """Return the path to the test fixtures directory."""
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def parser() -> ProblemParser:
    return ProblemParser()


@pytest.fixture
def load_problem(fixtures_dir: Path, parser: ProblemParser):
    """Load a problem file from the fixtures directory by stem."""
    def _load(name: str) -> Problem:
        return parser.load(fixtures_dir / f"{name}.json")
    return _load


@pytest.fixture
def fourier() -> SLEquation:
    """N = 2, f = 1, q = 0, w = 1; Phi_2 = [[1-l, 2-l], [l^2-2l, l^2-3l+1]]."""
    return SLEquation.create([1.0, 1.0, 1.0], [0.0, 0.0], [1.0, 1.0])


@pytest.fixture
def dirichlet_bc() -> BoundaryCondition:
    """y_0 = y_N = 0; only eigenvalue 2 on the Fourier equation."""
    return separated_bc(0.0, math.pi)


@pytest.fixture
def neumann_bc() -> BoundaryCondition:
    """f_0 Delta y_0 = f_N Delta y_N = 0; eigenvalues 0 and 2."""
    return separated_bc(math.pi / 2, math.pi / 2)


@pytest.fixture
def crossing_bc_at_3() -> BoundaryCondition:
    """Chart O14 point (a12, b21) = (3, 0); eigenvalues 0 and 1."""
    return BoundaryCondition.from_matrix([[1, 3, -1, 0], [0, -1, 0, 1]])


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so random problems are reproducible."""
    return np.random.default_rng(20251010)


@pytest.fixture
def random_equation(rng: np.random.Generator):
    """Factory for real positive-weight equations of size N."""
    def _make(n: int) -> SLEquation:
        f = rng.uniform(0.5, 2.0, n + 1) * rng.choice([-1.0, 1.0], n + 1)
        q = rng.uniform(-1.0, 1.0, n)
        w = rng.uniform(0.5, 2.0, n)
        return SLEquation.create(f, q, w)
    return _make


@pytest.fixture
def random_self_adjoint_bc(rng: np.random.Generator):
    """Factory for canonical self-adjoint conditions; ``kind`` is "separated", "coupled" or random."""
    def _make(kind: Optional[str] = None) -> BoundaryCondition:
        kind = kind or ("separated" if rng.random() < 0.5 else "coupled")
        if kind == "separated":
            return canonical_bc(SeparatedParams(rng.uniform(0, math.pi), rng.uniform(0.01, math.pi)))
        a = rng.uniform(0.5, 2.0)
        b, c = rng.uniform(-2, 2, 2)
        d = (1.0 + b * c) / a
        return canonical_bc(CoupledParams(rng.uniform(0, math.pi), np.array([[a, b], [c, d]])))
    return _make


@pytest.fixture
def random_complex_problem(rng: np.random.Generator):
    """Factory for non-self-adjoint problems: complex q, indefinite w, random complex (A|B)."""
    def _make(n: int) -> Tuple[SLEquation, BoundaryCondition]:
        f = rng.uniform(0.5, 2.0, n + 1) * rng.choice([-1.0, 1.0], n + 1)
        q = rng.normal(size=n) + 1j * rng.normal(size=n)
        w = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
        bc = BoundaryCondition.from_matrix(rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4)))
        return SLEquation.create(f, q, w), bc
    return _make


def pytest_configure(config):
    """Configure pytest with custom settings."""
    config.addinivalue_line(
        "markers", "unit: mark test as a unit test"
    )
    config.addinivalue_line(
        "markers", "integration: mark test as an integration test"
    )
