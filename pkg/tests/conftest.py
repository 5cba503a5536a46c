# tests/conftest.py
"""
Shared spectra. Computing a spectrum costs a few hundred Whittaker
integrations, so each parameter point is solved once per session.
"""

import pytest

from WMorse.core.spectrum.solver import compute_spectrum
from WMorse.core.types import PotentialParams

REPULSIVE = PotentialParams(g=1.0, k=-0.5)
FREE_KINK = PotentialParams(g=1.0, k=0.0)
DEEP_WELL = PotentialParams(g=1.0, k=3.0)


@pytest.fixture(scope="session")
def repulsive_levels():
    return compute_spectrum(REPULSIVE, 10)


@pytest.fixture(scope="session")
def kink_levels():
    return compute_spectrum(FREE_KINK, 10)


@pytest.fixture(scope="session")
def well_levels():
    return compute_spectrum(DEEP_WELL, 8)


@pytest.fixture
def no_colour(monkeypatch):
    """Keep colorama from rewrapping the captured streams."""
    monkeypatch.setattr("WMorse.app.cli.init_console", lambda: None)
