import numpy as np
import pytest

from stembranch import ModelParams


@pytest.fixture(scope="session")
def bicritical():
    return ModelParams(alpha=0.5, p=0.5, lambda_a=1.0, lambda_b=1.0)


@pytest.fixture(scope="session")
def bicritical_small_mu():
    # mu = 4*lambda_a/lambda_b < 1 keeps the Bessel order real
    return ModelParams(alpha=0.5, p=0.5, lambda_a=0.2, lambda_b=1.0)


@pytest.fixture(scope="session")
def crit_b_super_a():
    return ModelParams(alpha=0.25, p=0.5, lambda_a=1.0, lambda_b=1.0)


@pytest.fixture(scope="session")
def crit_b_sub_a():
    return ModelParams(alpha=0.75, p=0.5, lambda_a=1.0, lambda_b=1.0)


@pytest.fixture(scope="session")
def super_b():
    return ModelParams(alpha=0.5, p=0.3, lambda_a=1.0, lambda_b=1.0)


def fit_affine_slope(ts, ys):
    """Least-squares slope of ys against ts."""
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return float(np.polyfit(ts, ys, 1)[0])
