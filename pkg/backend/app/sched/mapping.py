"""
Placement par liste avec insertion : politique de créneaux commune à HEFT,
GreenHEFT, MOHEFT et à l'oracle exhaustif

Un nœud exécute plusieurs tâches en parallèle tant que la somme de leurs
cœurs ne dépasse pas ses cœurs virtuels.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import networkx as nx

from app.model.dag import validate_dag
from app.model.schemas import ClusterSpec, WorkflowDag
from app.sched.rank import transfer_time
from app.sched.schemas import Assignment, EstimateTable, Schedule

Interval = tuple[float, float, int]  # (début, fin, cœurs)


def fits_interval(intervals: Sequence[Interval], start: float, finish: float, cores: int, capacity: int) -> bool:
    """Vérifie que [start, finish) ne dépasse jamais la capacité du nœud"""
    if finish <= start:
        return True
    points = [start] + [s for s, _, _ in intervals if start < s < finish]
    for p in points:
        used = sum(c for s, f, c in intervals if s <= p < f)
        if used + cores > capacity:
            return False
    return True


def earliest_slot(intervals: Sequence[Interval], ready: float, duration: float, cores: int, capacity: int) -> float:
    """
    Premier instant >= ready où la tâche tient sur le nœud pendant toute sa durée

    Les candidats sont l'instant de disponibilité et les fins de tâches
    postérieures ; après la dernière fin le nœud est libre.
    """
    candidates = sorted({ready} | {f for _, f, _ in intervals if f > ready})
    for t in candidates:
        if fits_interval(intervals, t, t + duration, cores, capacity):
            return t
    return candidates[-1]


@dataclass
class PartialSchedule:
    """Ordonnancement en construction ; `place` renvoie une copie étendue"""

    assignments: dict[str, Assignment] = field(default_factory=dict)
    intervals: dict[str, list[Interval]] = field(default_factory=dict)
    energy_wh: float = 0.0
    makespan_s: float = 0.0
    order: tuple[tuple[str, str], ...] = ()

    @property
    def objectives(self) -> tuple[float, float]:
        return self.makespan_s, self.energy_wh

    def key(self) -> tuple:
        return (self.makespan_s, self.energy_wh, self.order)

    def to_schedule(self, algorithm: str) -> Schedule:
        return Schedule(
            assignments=dict(sorted(self.assignments.items())),
            makespan_s=self.makespan_s,
            energy_wh=self.energy_wh,
            algorithm=algorithm,
        )


class SlotPlanner:
    """Calcule les créneaux d'une tâche sur chaque nœud d'un ordonnancement partiel"""

    def __init__(self, dag: WorkflowDag, cluster: ClusterSpec, estimates: EstimateTable, comm_rate: float = 0.0):
        self.graph: nx.DiGraph = validate_dag(dag)
        self.capacity = {n.id: n.virtual_cores for n in cluster.nodes}
        self.cores = {t.id: t.cores_required for t in dag.tasks}
        self.estimates = estimates
        self.comm_rate = comm_rate

    def ready_time(self, partial: PartialSchedule, task_id: str, node_id: str) -> float:
        ready = 0.0
        for pred in self.graph.predecessors(task_id):
            placed = partial.assignments[pred]
            arrival = placed.finish_s
            if placed.node_id != node_id:
                arrival += transfer_time(self.graph.edges[pred, task_id]["data_size_mb"], self.comm_rate)
            ready = max(ready, arrival)
        return ready

    def slot(self, partial: PartialSchedule, task_id: str, node_id: str) -> tuple[float, float]:
        """
        Returns:
            tuple: (début, fin) du premier créneau faisable
        """
        runtime = self.estimates.get(task_id, node_id).runtime_s
        start = earliest_slot(
            partial.intervals.get(node_id, []),
            self.ready_time(partial, task_id, node_id),
            runtime,
            self.cores[task_id],
            self.capacity[node_id],
        )
        return start, start + runtime

    def place(self, partial: PartialSchedule, task_id: str, node_id: str) -> PartialSchedule:
        start, finish = self.slot(partial, task_id, node_id)
        intervals = {k: list(v) for k, v in partial.intervals.items()}
        intervals.setdefault(node_id, []).append((start, finish, self.cores[task_id]))
        return PartialSchedule(
            assignments={**partial.assignments, task_id: Assignment(node_id=node_id, start_s=start, finish_s=finish)},
            intervals=intervals,
            energy_wh=partial.energy_wh + self.estimates.get(task_id, node_id).energy_wh,
            makespan_s=max(partial.makespan_s, finish),
            order=partial.order + ((task_id, node_id),),
        )

    def schedule_mapping(self, order: Sequence[str], mapping: dict[str, str]) -> PartialSchedule:
        """Place les tâches dans l'ordre donné, sur les nœuds imposés"""
        partial = PartialSchedule()
        for task_id in order:
            partial = self.place(partial, task_id, mapping[task_id])
        return partial
