import numpy as np
import pytest

from rising_gue.configuration import Configuration
from rising_gue.contours import QuadratureSettings
from rising_gue.grammar import ExpressionLexer, ExpressionParser


@pytest.fixture(scope="session")
def lexer():
    return ExpressionLexer()


@pytest.fixture
def parser():
    return ExpressionParser()


@pytest.fixture(scope="session")
def quad():
    return QuadratureSettings()


@pytest.fixture(scope="session")
def fast_quad():
    return QuadratureSettings(abs_tol=1e-9, rel_tol=1e-9)


@pytest.fixture(scope="session")
def two_point_cfg():
    return Configuration((1.0, -1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
