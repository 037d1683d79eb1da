"""
Fixtures partagées : fichiers d'exemple et petites instances d'ordonnancement
"""

from pathlib import Path

import pytest

from app.core.logging import configure_logging
from app.model.schemas import ClusterSpec, WorkflowDag
from tests.factories import make_cluster, make_dag, make_node, make_task

EXAMPLES = Path(__file__).resolve().parent.parent / "examples"

configure_logging("WARNING")


@pytest.fixture
def examples_dir() -> Path:
    return EXAMPLES


@pytest.fixture
def diamond() -> WorkflowDag:
    runtimes = {"A": 2.0, "B": 3.0, "C": 4.0, "D": 1.0}
    return make_dag(
        [make_task(t, {"n1": r, "n2": r}) for t, r in runtimes.items()],
        [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")],
        data_size_mb=1.0,
    )


@pytest.fixture
def two_nodes() -> ClusterSpec:
    return make_cluster(make_node("n1"), make_node("n2"))


@pytest.fixture
def fast_slow() -> ClusterSpec:
    """X rapide et gourmand, Y lent et sobre"""
    return make_cluster(make_node("X", static_w=40.0, peak_w=200.0), make_node("Y", static_w=5.0, peak_w=20.0))


@pytest.fixture
def chain3() -> WorkflowDag:
    return make_dag(
        [make_task(t, {"X": 10.0, "Y": 25.0}) for t in ("t1", "t2", "t3")],
        [("t1", "t2"), ("t2", "t3")],
    )
