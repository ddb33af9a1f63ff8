"""Shared fixtures and the acceptance-summary reporter.

Expensive full-window scattering runs are cached per session so the
acceptance tests and the property tests share them.
"""

import numpy as np
import pytest

from mlz import (
    IntegratorConfig,
    PresetParams,
    interference_model,
    scattering_matrix,
)

#: Worker threads for column-parallel propagation in tests.
JOBS = 2


def _coupling_ratio_params(g: float) -> PresetParams:
    """Canonical narrow-separation parameter set with coupling ratios
    0.85 : 1.0 : 1.15 at overall scale ``g``."""
    return PresetParams(eps1=0.25, eps2=0.35, g1=0.85 * g, g2=1.0 * g,
                        g3=1.15 * g, beta=1.0)


def _separation_scan_params(eps: float) -> PresetParams:
    """Canonical separation-scan parameter set (eps2 = 1.5 eps1)."""
    return PresetParams(eps1=eps, eps2=1.5 * eps, g1=0.25, g2=0.3, g3=0.35,
                        beta=1.0)


@pytest.fixture(scope="session")
def coupling_ratio_params():
    return _coupling_ratio_params


@pytest.fixture(scope="session")
def separation_scan_params():
    return _separation_scan_params


@pytest.fixture(scope="session")
def full_window_scattering():
    """Memoized interference-preset scattering at the default window.

    Returns a getter: ``get(g)`` propagates all six basis states over
    [-1000, 1000] at default tolerances for the coupling-ratio preset
    at scale ``g``.
    """
    cache = {}

    def get(g: float):
        if g not in cache:
            model = interference_model(_coupling_ratio_params(g))
            cache[g] = scattering_matrix(model, IntegratorConfig(), jobs=JOBS)
        return cache[g]

    return get


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance check."""
    labels = {
        "passed": "PASS",
        "failed": "FAIL",
        "error": "ERROR",
        "xfailed": "FAIL (expected; see test for the measured floor)",
        "xpassed": "UNEXPECTED PASS",
    }
    lines = []
    for status, label in labels.items():
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid:
                lines.append((nodeid.split("::", 1)[1], label))
    if lines:
        terminalreporter.write_sep("-", "acceptance checks")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"{label:<55} {name}")
