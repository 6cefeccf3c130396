"""Fixtures shared across the test modules."""

from __future__ import annotations

import pytest

from generators import RANGES
from stlmon.formula import VariableDeclarations


@pytest.fixture
def decls() -> VariableDeclarations:
    return VariableDeclarations.of(**RANGES)
