"""
Grandeurs physiques avec unité explicite

Les calculs internes se font en unités de base (W, Wh, g, s) ; les
Quantity n'apparaissent qu'aux frontières de l'API (rapports, JSON).
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import IncompatibleUnits


class Unit(str, Enum):
    W = "W"
    WH = "Wh"
    KWH = "kWh"
    G_CO2E = "gCO2e"
    KG_CO2E = "kgCO2e"
    G_CO2E_PER_KWH = "gCO2e_per_kWh"
    SECONDS = "seconds"
    HOURS = "hours"


# unité -> (dimension, facteur vers l'unité de base)
_UNITS: dict[Unit, tuple[str, float]] = {
    Unit.W: ("power", 1.0),
    Unit.WH: ("energy", 1.0),
    Unit.KWH: ("energy", 1000.0),
    Unit.G_CO2E: ("mass", 1.0),
    Unit.KG_CO2E: ("mass", 1000.0),
    Unit.G_CO2E_PER_KWH: ("intensity", 1.0),
    Unit.SECONDS: ("time", 1.0),
    Unit.HOURS: ("time", 3600.0),
}


def dimension(unit: Unit) -> str:
    return _UNITS[unit][0]


class Quantity(BaseModel):
    """Valeur positive ou nulle accompagnée de son unité"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    value: float = Field(..., ge=0)
    unit: Unit

    def _check_same_dimension(self, other: "Quantity") -> None:
        if dimension(self.unit) != dimension(other.unit):
            raise IncompatibleUnits(f"cannot combine {self.unit.value} with {other.unit.value}")

    def to(self, unit: Unit) -> "Quantity":
        """
        Convertit vers une autre unité de la même dimension

        Raises:
            IncompatibleUnits: Si les dimensions diffèrent
        """
        if dimension(self.unit) != dimension(unit):
            raise IncompatibleUnits(f"cannot convert {self.unit.value} to {unit.value}")
        if unit == self.unit:
            return self
        factor_from = _UNITS[self.unit][1]
        factor_to = _UNITS[unit][1]
        if factor_from >= factor_to:
            return Quantity(value=self.value * (factor_from / factor_to), unit=unit)
        return Quantity(value=self.value / (factor_to / factor_from), unit=unit)

    def __add__(self, other: "Quantity") -> "Quantity":
        self._check_same_dimension(other)
        return Quantity(value=self.value + other.to(self.unit).value, unit=self.unit)

    def __mul__(self, factor: float) -> "Quantity":
        if isinstance(factor, Quantity):
            raise IncompatibleUnits("multiplying two quantities is not supported")
        return Quantity(value=self.value * factor, unit=self.unit)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"{self.value} {self.unit.value}"


def watt_hours(value: float) -> Quantity:
    return Quantity(value=value, unit=Unit.WH)


def grams(value: float) -> Quantity:
    return Quantity(value=value, unit=Unit.G_CO2E)

