"""
Schemas Pydantic pour l'intensité carbone
"""

from datetime import datetime, timedelta, timezone
from typing import Optional

from pydantic import Field, field_validator, model_validator

from app.power.schemas import FrozenModel

SECONDS_PER_YEAR = 365 * 24 * 3600


def as_utc(value: datetime) -> datetime:
    """Les horodatages sans fuseau sont interprétés en UTC"""
    if value.tzinfo is None:
        return value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


class CarbonIntensity(FrozenModel):
    """Intensité carbone moyenne annuelle d'une région"""

    value: float = Field(..., ge=0, description="gCO2e par kWh")
    region: str
    year: int
    source: str = "bundled"


class CarbonIntensitySeries(FrozenModel):
    """
    Série temporelle d'intensité carbone, constante par morceaux

    Chaque échantillon vaut sur [t_i, t_i+1). Le dernier intervalle se termine
    à `end` si fourni, sinon après le même pas que l'avant-dernier.
    """

    region: str
    samples: tuple[tuple[datetime, float], ...]
    end: Optional[datetime] = None

    @field_validator("samples")
    @classmethod
    def check_samples(cls, v: tuple[tuple[datetime, float], ...]) -> tuple[tuple[datetime, float], ...]:
        if not v:
            raise ValueError("a carbon intensity series needs at least one sample")
        normalised = tuple((as_utc(ts), value) for ts, value in v)
        for (prev, _), (cur, _) in zip(normalised, normalised[1:]):
            if cur <= prev:
                raise ValueError("timestamps must be strictly increasing")
        if any(value < 0 for _, value in normalised):
            raise ValueError("carbon intensity must be >= 0")
        return normalised

    @field_validator("end")
    @classmethod
    def normalise_end(cls, v: Optional[datetime]) -> Optional[datetime]:
        return as_utc(v) if v is not None else None

    @model_validator(mode="after")
    def check_end(self) -> "CarbonIntensitySeries":
        if self.end is not None and self.end <= self.samples[-1][0]:
            raise ValueError("end must come after the last sample")
        return self

    @property
    def start(self) -> datetime:
        return self.samples[0][0]

    @property
    def coverage_end(self) -> datetime:
        if self.end is not None:
            return self.end
        if len(self.samples) == 1:
            return self.samples[0][0]
        step: timedelta = self.samples[-1][0] - self.samples[-2][0]
        return self.samples[-1][0] + step

    def boundaries(self) -> tuple[list[float], list[float]]:
        """
        Bornes des intervalles en secondes depuis le début de la série

        Returns:
            tuple: (bornes, valeurs) avec len(bornes) == len(valeurs) + 1
        """
        origin = self.start
        bounds = [(ts - origin).total_seconds() for ts, _ in self.samples]
        bounds.append((self.coverage_end - origin).total_seconds())
        return bounds, [value for _, value in self.samples]


class EmbodiedProfile(FrozenModel):
    """Carbone intrinsèque (fabrication) d'un nœud et sa durée de vie"""

    embodied_kgco2e: float = Field(..., ge=0)
    lifetime_years: float = Field(..., gt=0)

    @property
    def lifetime_s(self) -> float:
        return self.lifetime_years * SECONDS_PER_YEAR


class ShiftRequest(FrozenModel):
    """Recherche d'heure de démarrage sur une série d'intensité carbone"""

    profile: tuple[tuple[float, float], ...] = Field(..., description="(durée_s, watts) successifs")
    series: CarbonIntensitySeries
    window_start: datetime
    window_end: datetime
    step_s: float = Field(..., gt=0)
    pue: float = Field(1.0, ge=1.0)


class RegionRankingRequest(FrozenModel):
    """Régions candidates à classer pour une année"""

    regions: tuple[str, ...] = Field(..., min_length=1)
    year: int
    energy_kwh: float = Field(0.0, ge=0, description="Énergie informatique du run")
    pue: float = Field(1.0, ge=1.0)


class RegionEmissions(FrozenModel):
    """Région candidate : intensité annuelle et émissions du run s'il y tournait"""

    region: str
    year: int
    ci_gco2e_per_kwh: float
    emissions_g: float
