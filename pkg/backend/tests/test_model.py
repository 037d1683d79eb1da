import json
import random

import pytest
from pydantic import ValidationError

from app.core.errors import CycleDetected, IncompatibleUnits, InvalidInput, NotDownwardClosed, UnknownNode, UnknownTask
from app.model.dag import ready_tasks, topological_order, validate_dag
from app.model.loader import load_cluster, load_workflow
from app.model.schemas import DiskSpec, NodeSpec
from app.model.units import Quantity, Unit, grams, watt_hours
from tests.factories import make_cluster, make_dag, make_node, make_task


class TestQuantity:
    def test_conversion(self):
        assert watt_hours(1500).to(Unit.KWH).value == pytest.approx(1.5)
        assert Quantity(value=2, unit=Unit.KG_CO2E).to(Unit.G_CO2E).value == 2000

    def test_addition_across_units(self):
        total = watt_hours(500) + Quantity(value=1, unit=Unit.KWH)
        assert total.unit == Unit.WH
        assert total.value == pytest.approx(1500)

    def test_scaling(self):
        assert (grams(3) * 2).value == 6
        assert (2 * grams(3)).value == 6

    def test_incompatible_dimensions(self):
        with pytest.raises(IncompatibleUnits):
            watt_hours(1) + grams(1)
        with pytest.raises(IncompatibleUnits):
            watt_hours(1).to(Unit.G_CO2E)

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            Quantity(value=-1, unit=Unit.W)


class TestSchemas:
    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            NodeSpec.model_validate({
                "id": "n", "cpu": {"static_w": 1, "peak_w": 2}, "virtual_cores": 1,
                "lifetime_years": 1, "colour": "blue",
            })

    def test_disk_parameterisation(self):
        with pytest.raises(ValidationError):
            DiskSpec(kind="HDD", power_w_per_tb=1.0)
        with pytest.raises(ValidationError):
            DiskSpec(kind="SSD", capacity_tb=1.0, power_w=5.0)

    def test_frequency_ratios_sorted_and_include_nominal(self):
        node = make_node("n", max_frequency_ratio=(0.6, 1.0, 0.8))
        assert node.max_frequency_ratio == (1.0, 0.8, 0.6)
        with pytest.raises(ValidationError):
            make_node("n", max_frequency_ratio=(0.8,))

    def test_duplicate_node_ids(self):
        with pytest.raises(ValidationError):
            make_cluster(make_node("a"), make_node("a"))

    def test_cluster_lookup(self):
        cluster = make_cluster(make_node("b"), make_node("a"))
        assert cluster.node_ids == ["a", "b"]
        with pytest.raises(UnknownNode):
            cluster.node("c")


class TestDag:
    def test_cycle_named_from_smallest_id(self):
        dag = make_dag([make_task(t, {}) for t in "abc"], [("b", "c"), ("c", "a"), ("a", "b")])
        with pytest.raises(CycleDetected) as exc:
            validate_dag(dag)
        assert exc.value.cycle == ["a", "b", "c"]
        assert exc.value.code == "CycleDetected"

    def test_dangling_channel(self):
        dag = make_dag([make_task("a", {})], [("a", "ghost")])
        with pytest.raises(UnknownTask):
            validate_dag(dag)

    def test_topological_order_is_lexicographic(self, diamond):
        assert topological_order(diamond) == ["A", "B", "C", "D"]

    def test_ready_tasks(self, diamond):
        assert ready_tasks(diamond, []) == {"A"}
        assert ready_tasks(diamond, ["A"]) == {"B", "C"}
        assert ready_tasks(diamond, ["A", "B"]) == {"C"}
        assert ready_tasks(diamond, ["A", "B", "C", "D"]) == frozenset()

    def test_ready_tasks_requires_downward_closed(self, diamond):
        with pytest.raises(NotDownwardClosed):
            ready_tasks(diamond, ["B"])
        with pytest.raises(UnknownTask):
            ready_tasks(diamond, ["Z"])

    def test_empty_dag(self):
        assert topological_order(make_dag([])) == []

    def test_seven_task_workflow(self):
        edges = [("A", "B"), ("B", "C"), ("B", "E"), ("C", "D"), ("E", "F"), ("D", "G"), ("F", "G")]
        dag = make_dag([make_task(t, {}) for t in "ABCDEFG"], edges)
        validate_dag(dag)
        order = topological_order(dag)
        assert order[0] == "A"
        assert order[-1] == "G"
        assert ready_tasks(dag, []) == {"A"}
        assert ready_tasks(dag, ["A"]) == {"B"}
        assert ready_tasks(dag, ["A", "B"]) == {"C", "E"}


def random_dag(seed: int):
    rng = random.Random(seed)
    ids = [f"t{i:02d}" for i in range(rng.randint(1, 20))]
    # arêtes uniquement vers l'avant d'une permutation : acyclique par construction
    shuffled = rng.sample(ids, len(ids))
    edges = [
        (shuffled[i], shuffled[j])
        for i in range(len(shuffled)) for j in range(i + 1, len(shuffled))
        if rng.random() < 0.2
    ]
    return make_dag([make_task(t, {}) for t in ids], edges), edges


@pytest.mark.parametrize("seed", range(50))
def test_topological_order_respects_precedence(seed):
    dag, edges = random_dag(seed)
    order = topological_order(dag)
    assert sorted(order) == dag.task_ids
    position = {t: i for i, t in enumerate(order)}
    assert all(position[a] < position[b] for a, b in edges)


@pytest.mark.parametrize("seed", range(50))
def test_ready_tasks_reach_every_task(seed):
    dag, edges = random_dag(seed)
    predecessors = {t: {a for a, b in edges if b == t} for t in dag.task_ids}
    completed: set[str] = set()
    while True:
        ready = ready_tasks(dag, completed)
        assert ready == {t for t in dag.task_ids if t not in completed and predecessors[t] <= completed}
        if not ready:
            break
        completed |= ready
    assert completed == set(dag.task_ids)


class TestLoader:
    def test_load_bundled_examples(self, examples_dir):
        cluster = load_cluster(examples_dir / "scheduling" / "two_nodes.json")
        dag = load_workflow(examples_dir / "scheduling" / "diamond.json")
        assert cluster.node_ids == ["n1", "n2"]
        assert dag.task_ids == ["A", "B", "C", "D"]

    def test_invalid_json_wrapped(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(InvalidInput):
            load_cluster(path)

    def test_validation_error_wrapped(self, tmp_path):
        path = tmp_path / "cluster.json"
        path.write_text(json.dumps({"nodes": [], "pue": 0.5}), encoding="utf-8")
        with pytest.raises(InvalidInput) as exc:
            load_cluster(path)
        assert "pue" in str(exc.value)

    def test_cyclic_workflow_file(self, tmp_path):
        path = tmp_path / "dag.json"
        path.write_text(json.dumps({
            "tasks": [{"id": "a"}, {"id": "b"}],
            "channels": [{"producer": "a", "consumer": "b"}, {"producer": "b", "consumer": "a"}],
        }), encoding="utf-8")
        with pytest.raises(CycleDetected):
            load_workflow(path)

    def test_non_utf8_file_wrapped(self, tmp_path):
        path = tmp_path / "cluster.json"
        path.write_bytes(b'{"nodes": [], "region": "\xff"}')
        with pytest.raises(InvalidInput) as exc:
            load_cluster(path)
        assert "UTF-8" in str(exc.value)
