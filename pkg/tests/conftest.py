import math

import pytest

from ftir_interrogation import OpticalStack, SourceModel, TrialConfig, gap_for_damage_ratio

# Frozen from a 40-digit mpmath evaluation.
WORKED_RATE = 672.43
WORKED_T_STATISTIC = -2.580256338482133779
XI_DEFAULT_NM = 81.44917997140268005


GLASS_AIR = OpticalStack(
    n_incident=1.5, n_gap=1.0, n_object=1.5,
    theta_incidence=1.2, wavelength_incident=500.0, gap_distance=1000.0,
)


@pytest.fixture
def glass_air():
    return GLASS_AIR


@pytest.fixture
def worked_stack(glass_air):
    """Glass/air stack with the gap set so that |a|^2 / |b|^2 = 100."""
    return glass_air.with_gap(gap_for_damage_ratio(glass_air, 100.0))


@pytest.fixture
def worked_trial(worked_stack):
    return TrialConfig(stack=worked_stack, source=SourceModel(WORKED_RATE), duration=0.15)


def rel_err(x, y):
    return abs(x - y) / abs(y) if y else abs(x)


def standard_error_of_fano(counts):
    """Delta-method standard error of var/mean from the sample moments."""
    import numpy as np

    x = np.asarray(counts, dtype=float)
    n = x.size
    m = x.mean()
    c = x - m
    m2 = np.mean(c**2)
    m3 = np.mean(c**3)
    m4 = np.mean(c**4)
    # gradient of g(m, v) = v / m against the covariance of (mean, variance)
    var_m = m2 / n
    var_v = (m4 - m2**2) / n
    cov_mv = m3 / n
    gm = -m2 / m**2
    gv = 1.0 / m
    return math.sqrt(gm**2 * var_m + gv**2 * var_v + 2 * gm * gv * cov_mv)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
