"""Shared fixtures for the qgamma test suite."""

import json
from pathlib import Path

import pytest

from qgamma.conditions import builtin_field
from qgamma.geometry import make_params

SCHEMA_PATH = Path(__file__).resolve().parents[1] / "src" / "qgamma" / "schemas" / "summary.schema.json"


@pytest.fixture(scope="session")
def params_1d():
    return make_params(1, 0.25)


@pytest.fixture(scope="session")
def params_2d():
    return make_params(2, 0.5)


@pytest.fixture(scope="session")
def params_3d():
    return make_params(3, 1.0)


@pytest.fixture(scope="session")
def two_bump_1d():
    return builtin_field("two-bump", 1)


@pytest.fixture(scope="session")
def two_bump_2d():
    return builtin_field("two-bump", 2)


@pytest.fixture(scope="session")
def summary_schema():
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)
