"""
Schemas Pydantic pour les traces d'exécution
"""

from datetime import date, datetime
from typing import Literal, Optional

from pydantic import Field, field_validator

from app.power.schemas import FrozenModel

TraceFormat = Literal["canonical-csv", "canonical-json"]


class TraceRecord(FrozenModel):
    """Une exécution de tâche observée"""

    task_id: str = Field(..., min_length=1)
    task_name: str
    node_id: str
    realtime_s: float = Field(..., ge=0)
    allocated_cores: int = Field(..., ge=1)
    cpu_utilisation: float = Field(..., ge=0, description="Fraction des cœurs alloués, peut dépasser 1")
    peak_memory_gb: float = Field(0.0, ge=0)
    read_mb: float = Field(0.0, ge=0)
    write_mb: float = Field(0.0, ge=0)
    start_time: Optional[datetime] = None
    # Champs absents de la trace, remplacés par leur valeur par défaut
    defaults_applied: tuple[str, ...] = ()

    @property
    def core_seconds(self) -> float:
        return self.realtime_s * self.allocated_cores


class TraceMetadata(FrozenModel):
    workflow_name: str = ""
    cluster_id: str = ""
    execution_date: Optional[date] = None


class RunTrace(FrozenModel):
    """Ensemble des exécutions d'un run de workflow"""

    records: tuple[TraceRecord, ...] = ()
    metadata: TraceMetadata = TraceMetadata()

    @field_validator("records")
    @classmethod
    def check_unique_task_ids(cls, v: tuple[TraceRecord, ...]) -> tuple[TraceRecord, ...]:
        ids = [r.task_id for r in v]
        if len(ids) != len(set(ids)):
            raise ValueError("task_id values must be unique within a run")
        return v


class TaskNameAggregate(FrozenModel):
    """Agrégat des exécutions partageant un même nom de tâche"""

    count: int
    total_cpu_core_seconds: float
    mean_utilisation: float
    max_memory_gb: float
