"""
Schemas Pydantic pour l'ordonnancement
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import MissingCostEntry
from app.model.schemas import ClusterSpec, WorkflowDag
from app.power.schemas import FrozenModel


class Assignment(FrozenModel):
    node_id: str
    start_s: float = Field(..., ge=0)
    finish_s: float = Field(..., ge=0)
    frequency_ratio: float = Field(1.0, gt=0, le=1)


class Schedule(FrozenModel):
    """Placement tâche -> (nœud, début, fin, ratio de fréquence)"""

    assignments: dict[str, Assignment] = Field(default_factory=dict)
    makespan_s: float = 0.0
    energy_wh: float = 0.0
    algorithm: str = ""
    idle_accounting: bool = False

    def mapping_key(self) -> tuple[str, ...]:
        """Nœuds dans l'ordre des identifiants de tâches (clé de tri stable)"""
        return tuple(self.assignments[t].node_id for t in sorted(self.assignments))


class TaskNodeEstimate(FrozenModel):
    """Durée et énergie d'une tâche sur un nœud, à fréquence nominale"""

    runtime_s: float = Field(..., ge=0)
    energy_wh: float = Field(..., ge=0)
    utilisation: float = Field(..., ge=0, le=1)
    static_w: float = Field(..., ge=0, description="Part statique CPU attribuée")
    dynamic_w: float = Field(..., ge=0, description="Part dynamique CPU attribuée")
    memory_w: float = Field(0.0, ge=0)


class EstimateTable(FrozenModel):
    """
    Estimations par (tâche, nœud)

    Un nœud absent pour une tâche signifie que la tâche n'y tient pas
    (cœurs ou mémoire insuffisants).
    """

    entries: dict[str, dict[str, TaskNodeEstimate]] = Field(default_factory=dict)

    def get(self, task_id: str, node_id: str) -> TaskNodeEstimate:
        try:
            return self.entries[task_id][node_id]
        except KeyError:
            raise MissingCostEntry(task_id, node_id) from None

    def nodes_for(self, task_id: str) -> list[str]:
        return sorted(self.entries.get(task_id, {}))

    def has(self, task_id: str, node_id: str) -> bool:
        return node_id in self.entries.get(task_id, {})


class ParetoFront(FrozenModel):
    """Solutions mutuellement non dominées (durée totale, énergie)"""

    solutions: tuple[Schedule, ...] = ()

    def points(self) -> list[tuple[float, float]]:
        return [(s.makespan_s, s.energy_wh) for s in self.solutions]


class Evaluation(BaseModel):
    model_config = ConfigDict(frozen=True)

    makespan_s: float
    energy_wh: float
    idle_energy_wh: float = 0.0
    idle_accounting: bool = False


class ConsolidationTask(FrozenModel):
    cores: int = Field(..., ge=1)
    duration_s: float = Field(..., ge=0)
    utilisation: float = Field(1.0, ge=0, le=1)


class ConsolidationResult(FrozenModel):
    """Placement consolidé comparé à un placement étalé (une tâche par nœud)"""

    packing: dict[int, str]
    nodes_powered: int
    consolidated_energy_wh: float
    spread_energy_wh: float
    spread_nodes: int

    @property
    def energy_delta_wh(self) -> float:
        return self.spread_energy_wh - self.consolidated_energy_wh


class DvfsResult(FrozenModel):
    frequency_ratio: float
    runtime_s: float
    watts: float
    energy_wh: float


class DvfsSweep(FrozenModel):
    results: tuple[DvfsResult, ...]
    best_ratio: Optional[float] = None


class ScheduleRequest(FrozenModel):
    """Requête d'ordonnancement : workflow, cluster et algorithme"""

    algo: Literal["heft", "greenheft", "moheft", "brute"] = "heft"
    k: int = Field(8, ge=1, description="Population MOHEFT")
    dag: WorkflowDag
    cluster: ClusterSpec
    comm_rate: float = Field(0.0, ge=0, description="Mo/s ; 0 = transferts gratuits")
    idle_accounting: bool = False


class ScheduleResult(FrozenModel):
    """Un ordonnancement unique (heft, greenheft) ou un front (moheft, brute)"""

    algorithm: str
    schedule: Optional[Schedule] = None
    front: Optional[ParetoFront] = None
