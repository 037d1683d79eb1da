"""
Schemas Pydantic pour les clusters et les workflows

Les noms de champs sont ceux des fichiers de configuration JSON ; tout champ
inconnu est refusé.
"""

from typing import Literal, Optional

from pydantic import Field, field_validator, model_validator

from app.core.errors import UnknownNode, UnknownTask
from app.power.schemas import FrozenModel, PerCorePowerModel, PowerModel


class DiskSpec(FrozenModel):
    """Disque (ou groupe de disques identiques) d'un nœud"""

    kind: Literal["HDD", "SSD"]
    capacity_tb: float = Field(0.0, ge=0)
    power_w: Optional[float] = Field(None, ge=0, description="Puissance par disque (HDD)")
    power_w_per_tb: Optional[float] = Field(None, ge=0, description="Puissance par To (SSD)")
    count: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_parameterisation(self) -> "DiskSpec":
        if self.kind == "HDD" and self.power_w_per_tb is not None:
            raise ValueError("HDD power is per disk: use power_w")
        if self.kind == "SSD" and self.power_w is not None:
            raise ValueError("SSD power is per TB: use power_w_per_tb")
        return self


class NodeSpec(FrozenModel):
    """Nœud de calcul (machine physique ou type d'instance cloud)"""

    id: str = Field(..., min_length=1)
    cpu: PowerModel
    virtual_cores: int = Field(..., ge=1)
    memory_gb: float = Field(0.0, ge=0)
    disks: tuple[DiskSpec, ...] = ()
    lifetime_years: float = Field(..., gt=0)
    embodied_kgco2e: float = Field(0.0, ge=0)
    max_frequency_ratio: tuple[float, ...] = (1.0,)
    per_core: Optional[PerCorePowerModel] = None

    @field_validator("max_frequency_ratio")
    @classmethod
    def check_ratios(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(not 0.0 < r <= 1.0 for r in v):
            raise ValueError("DVFS ratios must lie in (0, 1]")
        if 1.0 not in v:
            raise ValueError("DVFS ratio list must contain 1.0")
        return tuple(sorted(set(v), reverse=True))


class ClusterSpec(FrozenModel):
    """Cluster hétérogène"""

    nodes: tuple[NodeSpec, ...]
    pue: float = Field(1.0, ge=1.0)
    region: str = ""

    @field_validator("nodes")
    @classmethod
    def check_unique_ids(cls, v: tuple[NodeSpec, ...]) -> tuple[NodeSpec, ...]:
        ids = [n.id for n in v]
        if len(ids) != len(set(ids)):
            raise ValueError("node ids must be unique")
        return v

    def node(self, node_id: str) -> NodeSpec:
        """
        Retrouve un nœud par identifiant

        Raises:
            UnknownNode: Si l'identifiant est absent du cluster
        """
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise UnknownNode(node_id)

    @property
    def node_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes)


class CostEntry(FrozenModel):
    runtime_s: float = Field(..., ge=0)
    mean_cpu_utilisation: float = Field(..., ge=0, le=1)


class TaskSpec(FrozenModel):
    """Tâche d'un workflow avec ses coûts observés par nœud"""

    id: str = Field(..., min_length=1)
    cores_required: int = Field(1, ge=1)
    memory_gb_required: float = Field(0.0, ge=0)
    cost_table: dict[str, CostEntry] = Field(default_factory=dict)
    cpu_bound_fraction: float = Field(1.0, ge=0, le=1)


class Channel(FrozenModel):
    producer: str
    consumer: str
    data_size_mb: float = Field(0.0, ge=0)


class WorkflowDag(FrozenModel):
    """
    Workflow : tâches et canaux de données

    L'acyclicité et la résolution des références sont vérifiées par
    app.model.dag.validate_dag, qui nomme le cycle ou la référence fautive.
    """

    tasks: tuple[TaskSpec, ...] = ()
    channels: tuple[Channel, ...] = ()

    @field_validator("tasks")
    @classmethod
    def check_unique_ids(cls, v: tuple[TaskSpec, ...]) -> tuple[TaskSpec, ...]:
        ids = [t.id for t in v]
        if len(ids) != len(set(ids)):
            raise ValueError("task ids must be unique")
        return v

    def task(self, task_id: str) -> TaskSpec:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise UnknownTask(task_id)

    @property
    def task_ids(self) -> list[str]:
        return sorted(t.id for t in self.tasks)
