import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def mean_and_se(samples):
    """Sample mean and its standard error."""
    samples = np.asarray(samples, dtype=float)
    return float(samples.mean()), float(samples.std(ddof=1) / np.sqrt(samples.size))


def assert_within_3se(estimate, target, se, label=""):
    gap = abs(estimate - target)
    assert gap <= 3.0 * se, f"{label}: |{estimate} - {target}| = {gap} > 3*SE = {3 * se}"


def covariance_se(analytic, n):
    """SE matrix for empirical second moments of a centered Gaussian vector."""
    d = np.diag(analytic)
    return np.sqrt((np.outer(d, d) + analytic ** 2) / n)
