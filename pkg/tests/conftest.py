"""Shared fixtures. The expensive default run is computed once per session."""

import time

import pytest

from kgbreather import SimParams, integrate, make_grid


@pytest.fixture()
def default_params():
    return SimParams()


class DefaultRun:
    """Bundle of everything the full default simulation produced."""

    def __init__(self):
        self.params = SimParams()
        self.grid = make_grid(self.params.grid_points, self.params.domain_length)
        start = time.monotonic()
        self.summary, self.snapshots, self.diagnostics, self.tracks = integrate(
            self.params, self.grid
        )
        self.wall_seconds = time.monotonic() - start


@pytest.fixture(scope="session")
def default_run():
    """Full default simulation to t = 2048; shared by every test that needs it."""
    return DefaultRun()
