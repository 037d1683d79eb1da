"""
Décalage temporel : attendre une énergie moins carbonée

Le profil de puissance du workflow est figé ; seule l'heure de démarrage
varie sur une grille régulière. Le PUE est appliqué par l'appelant.
"""

import bisect
import csv
import io
from collections.abc import Sequence
from datetime import datetime, timedelta
from pathlib import Path
from typing import TextIO, Union

import structlog
from pydantic import BaseModel, ConfigDict

from app.carbon.intensity import read_utf8
from app.carbon.schemas import CarbonIntensitySeries, as_utc
from app.core.errors import InvalidInput, InvalidPue, SeriesCoverageInsufficient

logger = structlog.get_logger(__name__)

# Écart relatif sous lequel deux candidats sont considérés à égalité
TIE_TOLERANCE = 1e-9

PowerProfile = Sequence[tuple[float, float]]


class ShiftResult(BaseModel):
    """Résultat d'une recherche d'heure de démarrage"""

    model_config = ConfigDict(frozen=True)

    start: datetime
    emissions_g: float
    baseline_start: datetime
    baseline_emissions_g: float
    candidates: int
    energy_kwh: float

    @property
    def savings_g(self) -> float:
        return self.baseline_emissions_g - self.emissions_g


def profile_duration(profile: PowerProfile) -> float:
    return sum(duration for duration, _ in profile)


def profile_energy_kwh(profile: PowerProfile) -> float:
    return sum(duration * watts for duration, watts in profile) / 3600.0 / 1000.0


def _emissions_from_offset(
    profile: PowerProfile, offset_s: float, bounds: list[float], values: list[float]
) -> float:
    """Émissions (g) d'un profil démarrant `offset_s` secondes après le début de la série"""
    total = 0.0
    cursor = offset_s
    for duration, watts in profile:
        seg_end = cursor + duration
        idx = bisect.bisect_right(bounds, cursor) - 1
        while cursor < seg_end and idx + 1 < len(bounds):
            piece_end = min(seg_end, bounds[idx + 1])
            total += watts * (piece_end - cursor) / 3600.0 / 1000.0 * values[idx]
            cursor = piece_end
            idx += 1
        cursor = seg_end
    return total


def emissions_for_start(profile: PowerProfile, series: CarbonIntensitySeries, start: datetime) -> float:
    """
    Émissions (gCO2e, hors PUE) d'un profil démarrant à `start`

    Raises:
        SeriesCoverageInsufficient: Le profil dépasse la couverture de la série
    """
    bounds, values = series.boundaries()
    offset = (as_utc(start) - series.start).total_seconds()
    if offset < 0 or offset + profile_duration(profile) > bounds[-1]:
        raise SeriesCoverageInsufficient(
            f"profile starting at {as_utc(start).isoformat()} does not fit in series coverage "
            f"[{series.start.isoformat()}, {series.coverage_end.isoformat()})"
        )
    return _emissions_from_offset(profile, offset, bounds, values)


def best_start_time(
    power_profile: PowerProfile,
    series: CarbonIntensitySeries,
    window: tuple[datetime, datetime],
    step_s: float,
) -> ShiftResult:
    """
    Cherche l'heure de démarrage qui minimise les émissions

    Args:
        power_profile: Liste de (durée_s, watts)
        series: Série d'intensité carbone
        window: (démarrage au plus tôt, démarrage au plus tard), bornes incluses
        step_s: Pas de la grille de candidats

    Returns:
        ShiftResult: Meilleur démarrage (le plus tôt en cas d'égalité) et ses émissions

    Raises:
        InvalidInput: Fenêtre vide ou pas invalide
        SeriesCoverageInsufficient: Un candidat sort de la couverture de la série
    """
    earliest, latest = as_utc(window[0]), as_utc(window[1])
    if latest < earliest:
        raise InvalidInput("window end precedes window start")
    if step_s <= 0:
        raise InvalidInput("step_s must be > 0")
    if any(duration < 0 or watts < 0 for duration, watts in power_profile):
        raise InvalidInput("power profile durations and watts must be >= 0")

    span = (latest - earliest).total_seconds()
    count = int(span // step_s) + 1

    # La couverture est monotone : il suffit de vérifier le premier et le dernier candidat
    last = earliest + timedelta(seconds=(count - 1) * step_s)
    emissions_for_start(power_profile, series, earliest)
    emissions_for_start(power_profile, series, last)

    bounds, values = series.boundaries()
    origin_offset = (earliest - series.start).total_seconds()

    best_k = 0
    best_value = _emissions_from_offset(power_profile, origin_offset, bounds, values)
    baseline = best_value
    for k in range(1, count):
        value = _emissions_from_offset(power_profile, origin_offset + k * step_s, bounds, values)
        if value < best_value - TIE_TOLERANCE * max(1.0, abs(best_value)):
            best_k, best_value = k, value

    start = earliest + timedelta(seconds=best_k * step_s)
    logger.debug("décalage temporel évalué", candidates=count, best=start.isoformat(), emissions_g=best_value)
    return ShiftResult(
        start=start,
        emissions_g=best_value,
        baseline_start=earliest,
        baseline_emissions_g=baseline,
        candidates=count,
        energy_kwh=profile_energy_kwh(power_profile),
    )


def scale_profile(profile: PowerProfile, pue: float) -> list[tuple[float, float]]:
    """Profil côté installation : puissance informatique multipliée par le PUE"""
    if pue < 1.0:
        raise InvalidPue(pue)
    return [(duration, watts * pue) for duration, watts in profile]


def load_profile_csv(source: Union[str, Path, TextIO]) -> list[tuple[float, float]]:
    """
    Lit un profil de puissance `duration_s,watts`

    Raises:
        InvalidInput: En-tête ou ligne invalide
    """
    stream = io.StringIO(read_utf8(source)) if isinstance(source, (str, Path)) else source
    reader = csv.DictReader(stream)
    if reader.fieldnames != ["duration_s", "watts"]:
        raise InvalidInput(f"power profile header must be duration_s,watts, got {reader.fieldnames}")

    profile = []
    for line, row in enumerate(reader, start=2):
        try:
            duration, watts = float(row["duration_s"]), float(row["watts"])
        except (TypeError, ValueError) as e:
            raise InvalidInput(f"power profile line {line}: {e}") from e
        if duration < 0 or watts < 0:
            raise InvalidInput(f"power profile line {line}: values must be >= 0")
        profile.append((duration, watts))
    return profile
