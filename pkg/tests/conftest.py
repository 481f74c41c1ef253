from __future__ import annotations

import json
import pathlib

import pytest

_DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def golden():
    """Frozen high-precision constants (see tools/make_golden_constants.py)."""
    with open(_DATA / "golden_constants.json") as fh:
        return json.load(fh)
