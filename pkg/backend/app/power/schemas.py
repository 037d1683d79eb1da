"""
Schemas Pydantic pour les modèles de puissance
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class FrozenModel(BaseModel):
    """Base commune : valeurs immuables, champs inconnus refusés"""

    model_config = ConfigDict(extra="forbid", frozen=True)


class PowerModel(FrozenModel):
    """Modèle linéaire entre puissance statique (idle) et puissance crête"""

    static_w: float = Field(..., ge=0, description="Puissance statique (W)")
    peak_w: float = Field(..., ge=0, description="Puissance crête (W)")

    @model_validator(mode="after")
    def check_range(self) -> "PowerModel":
        if self.peak_w < self.static_w:
            raise ValueError("peak_w must be >= static_w")
        return self

    @property
    def dynamic_range_w(self) -> float:
        return self.peak_w - self.static_w


class PerCorePowerModel(FrozenModel):
    """Puissance par cœur virtuel, statique incluse (instances cloud)"""

    min_w_per_core: float = Field(..., ge=0)
    max_w_per_core: float = Field(..., ge=0)

    @model_validator(mode="after")
    def check_range(self) -> "PerCorePowerModel":
        if self.max_w_per_core < self.min_w_per_core:
            raise ValueError("max_w_per_core must be >= min_w_per_core")
        return self


class ComponentCoefficients(FrozenModel):
    """Coefficients mémoire et stockage"""

    memory_w_per_gb: float = Field(0.392, ge=0)
    hdd_w_per_disk: float = Field(6.5, ge=0)
    ssd_w_per_tb: float = Field(1.2, ge=0)


# Jeux de coefficients embarqués
COEFFICIENT_SETS: dict[str, ComponentCoefficients] = {
    "ccf-2023": ComponentCoefficients(),
}
