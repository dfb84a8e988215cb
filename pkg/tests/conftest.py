"""Shared fixtures for the Unruh Otto engine tests"""

import os

import numpy as np
import pytest

from unruh_otto.constants import LERCH_DEFAULT_REL_TOL
from unruh_otto.metrics import reset_metrics
from unruh_otto.response import clear_response_cache, set_lerch_rel_tol


@pytest.fixture(autouse=True)
def fresh_state():
    """Every test starts from an empty response cache, default accuracy and zeroed metrics."""
    set_lerch_rel_tol(LERCH_DEFAULT_REL_TOL)
    clear_response_cache()
    reset_metrics()
    yield
    clear_response_cache()


@pytest.fixture
def rng():
    return np.random.default_rng(seed=42)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep UNRUH_OTTO_* variables of the calling shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("UNRUH_OTTO_"):
            monkeypatch.delenv(key, raising=False)
