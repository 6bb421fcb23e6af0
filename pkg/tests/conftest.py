import numpy as np
import pytest

from abwave.moments import FluxParameter
from abwave.synthesis import EnsembleSpec


@pytest.fixture(scope="session")
def small_iso_spec():
    """A small isotropic ensemble shared across detector tests."""
    return EnsembleSpec(FluxParameter(0.0), master_seed=20240101,
                        n_samples=500, domain_radius=6.0, grid_h=0.2)


@pytest.fixture(scope="session")
def small_iso_vortices(small_iso_spec):
    from abwave.mc import _iter_batches
    from abwave.vortices import detect_vortices

    sets = []
    for batch in _iter_batches(small_iso_spec):
        sets.extend(detect_vortices(f) for f in batch)
    return sets


def assert_close(actual, expected, rtol=0.0, atol=0.0, msg=""):
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    tol = atol + rtol * np.abs(expected)
    err = np.abs(actual - expected)
    assert np.all(err <= tol), (
        f"{msg} max err {err.max():.3e} exceeds tol "
        f"(atol={atol:g}, rtol={rtol:g})")
