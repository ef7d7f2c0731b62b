"""Shared pytest fixtures for hetgt tests."""

from __future__ import annotations

import pytest

from hetgt.core.models.config import DropoutConfig
from hetgt.graph.fixtures import fixture_graph
from hetgt.graph.hetero_graph import HeteroGraph
from hetgt.graph.synthetic import generate_synthetic
from hetgt.tensor.tensor import get_precision, set_precision
from tests.helpers.builders import synthetic_spec


@pytest.fixture(autouse=True)
def _restore_precision():
    """Precision is process-wide; put it back after every test."""
    previous = get_precision()
    yield
    set_precision(previous)


@pytest.fixture
def f64():
    """Run the test in wide precision."""
    set_precision("f64")
    yield
    set_precision("f32")


@pytest.fixture
def fixture() -> HeteroGraph:
    """The canonical three-node graph (p0, p1, a0)."""
    return fixture_graph()


@pytest.fixture(scope="session")
def small_graph() -> HeteroGraph:
    """Session-scoped ACM-shaped synthetic graph (3 node types, 4 edge types)."""
    return generate_synthetic(synthetic_spec())


@pytest.fixture
def no_dropout() -> DropoutConfig:
    return DropoutConfig(projection=0.0, layer=0.0, attention=0.0)
