"""
Schemas Pydantic pour les estimations d'empreinte
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.model.schemas import NodeSpec
from app.model.units import Quantity
from app.power.schemas import ComponentCoefficients, FrozenModel, PerCorePowerModel
from app.trace.schemas import TaskNameAggregate

MemoryAttribution = Literal["allocated_gb", "full_node"]


class BulkRun(FrozenModel):
    """Run décrit globalement : n nœuds pendant une durée, utilisation moyenne"""

    node_count: int = Field(..., ge=0)
    duration_s: float = Field(..., ge=0)
    mean_cpu_utilisation: float = Field(..., ge=0, le=1)


class CoreHoursRun(FrozenModel):
    """Run décrit en heures-cœur (cloud, ressources inconnues)"""

    core_hours: float = Field(..., ge=0)
    per_core: PerCorePowerModel
    utilisation: float = Field(0.5, ge=0, le=1)


class ComponentEnergy(FrozenModel):
    cpu_wh: float = 0.0
    memory_wh: float = 0.0
    storage_wh: float = 0.0

    @property
    def total_wh(self) -> float:
        return self.cpu_wh + self.memory_wh + self.storage_wh


class TaskFootprint(FrozenModel):
    """Empreinte d'une exécution de tâche (ou d'un run global)"""

    task_id: str
    node_id: str
    duration_s: float
    energy_wh: ComponentEnergy
    energy_wh_total: float
    energy_wh_with_pue: float
    emissions_g: float


class RunTotals(FrozenModel):
    """Totaux du run, en unités de base"""

    cpu: Quantity
    memory: Quantity
    storage: Quantity
    energy_total: Quantity
    energy_with_pue: Quantity
    operational: Quantity
    embodied: Optional[Quantity] = None


class FootprintReport(FrozenModel):
    """Rapport d'empreinte d'un run"""

    kind: Literal["bulk", "core-hours", "trace"]
    tasks: tuple[TaskFootprint, ...] = ()
    task_groups: dict[str, TaskNameAggregate] = Field(default_factory=dict)
    totals: RunTotals
    pue: float
    ci_gco2e_per_kwh: float
    repetitions: int = 1
    lower_bound: bool = False
    coefficient_set: str = ""
    assumptions: tuple[str, ...] = ()


class StorageYearEstimate(FrozenModel):
    """Énergie et émissions annuelles d'un stockage SSD, comparées à la bande"""

    capacity_tb: float
    energy_per_year: Quantity
    energy_per_year_with_pue: Quantity
    emissions_per_year: Quantity
    tape_emissions_per_year: Quantity
    ssd_embodied: Quantity


class ReportComparison(BaseModel):
    """Rapports a/b par composant ; None quand b vaut zéro (indéfini)"""

    model_config = ConfigDict(frozen=True)

    cpu: Optional[float]
    memory: Optional[float]
    storage: Optional[float]
    energy_total: Optional[float]
    energy_with_pue: Optional[float]
    emissions: Optional[float]


class EstimateContext(FrozenModel):
    """Paramètres partagés par toutes les estimations d'un run"""

    coeffs: ComponentCoefficients = ComponentCoefficients()
    coefficient_set: str = "ccf-2023"
    pue: float = Field(1.0, ge=1.0)
    ci: float = Field(..., ge=0)
    ci_source: str = ""


class BulkRequest(FrozenModel):
    """Fichier d'entrée d'une estimation globale"""

    node: NodeSpec
    run: BulkRun
    repetitions: int = Field(1, ge=1)
    pue: Optional[float] = Field(None, ge=1.0)
    region: Optional[str] = None
    year: Optional[int] = None
    ci: Optional[float] = Field(None, ge=0)


class CoreHoursRequest(FrozenModel):
    """Fichier d'entrée d'une estimation en heures-cœur"""

    run: CoreHoursRun
    pue: Optional[float] = Field(None, ge=1.0)
    region: Optional[str] = None
    year: Optional[int] = None
    ci: Optional[float] = Field(None, ge=0)


class StorageRequest(FrozenModel):
    """Stockage SSD maintenu pendant un an"""

    capacity_tb: float = Field(..., ge=0)
    pue: Optional[float] = Field(None, ge=1.0)
    region: Optional[str] = None
    year: Optional[int] = None
    ci: Optional[float] = Field(None, ge=0)
