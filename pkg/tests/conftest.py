import sys
from pathlib import Path

import numpy as np
import pytest

# make oracles.py importable from every test module
sys.path.insert(0, str(Path(__file__).resolve().parent))

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def catalog_metric_samplers():
    """Every catalog metric with a sampler of random admissible points."""
    from subshear.spacetime_catalog import metric_by_name

    def box(*ranges):
        def sample(rng):
            return tuple(rng.uniform(lo, hi) for lo, hi in ranges)

        return sample

    sq = ((-2.0, 2.0),)
    return [
        (metric_by_name("euclidean4"), box(*sq * 4)),
        (metric_by_name("minkowski4"), box(*sq * 4)),
        (metric_by_name("minkowskiN", {"dim": 5}), box(*sq * 5)),
        (metric_by_name("riemannian_test"), box((0.5, 5.0), (0.3, 2.8), (0.0, 6.2), (-2.0, 2.0))),
        (metric_by_name("schwarzschild", {"m": 1.0}), box((-2.0, 2.0), (0.4, 8.0), (0.25, 2.9), (0.0, 6.2))),
        (metric_by_name("kerr", {"m": 1.0, "a": 0.5}), box((-2.0, 2.0), (0.3, 8.0), (0.25, 2.9), (0.0, 6.2))),
    ]


@pytest.fixture(scope="session")
def kerr_point_sampler():
    """Random admissible Kerr points (v, r, theta, phi), bounded away from
    the ring singularity and the axis so FD oracles stay well conditioned."""

    def sample(rng, a):
        while True:
            v = rng.uniform(-2.0, 2.0)
            r = rng.uniform(0.15, 8.0)
            th = rng.uniform(0.2, np.pi - 0.2)
            ph = rng.uniform(0.0, 2.0 * np.pi)
            if np.hypot(r, a * np.cos(th)) > 0.1:
                return (v, r, th, ph)

    return sample
