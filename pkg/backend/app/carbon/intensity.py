"""
Données d'intensité carbone : table annuelle embarquée et séries temporelles

La table embarquée ne contient que des moyennes annuelles publiées ; toute
autre donnée doit être fournie par l'utilisateur (CSV).
"""

import bisect
import csv
import io
from collections.abc import Iterable, Mapping
from datetime import datetime
from pathlib import Path
from typing import TextIO, Union

import structlog

from app.carbon.accounting import operational_emissions
from app.carbon.schemas import CarbonIntensity, CarbonIntensitySeries, RegionEmissions, as_utc
from app.core.errors import InvalidInput, TimestampOutOfRange, UnknownRegion

logger = structlog.get_logger(__name__)

BUNDLED_TABLE_PATH = Path(__file__).parent / "data" / "ci_annual.csv"

AnnualTable = Mapping[tuple[str, int], CarbonIntensity]


def read_utf8(path: Union[str, Path]) -> str:
    """
    Contenu texte d'un fichier CSV

    Raises:
        InvalidInput: Fichier qui n'est pas en UTF-8
    """
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise InvalidInput(f"{path}: not valid UTF-8 at byte {e.start}") from e


def _open(source: Union[str, Path, TextIO]) -> TextIO:
    if isinstance(source, (str, Path)):
        return io.StringIO(read_utf8(source))
    return source


def load_annual_csv(source: Union[str, Path, TextIO], label: str = "user") -> dict[tuple[str, int], CarbonIntensity]:
    """
    Lit une table annuelle `region,year,gco2e_per_kwh`

    Raises:
        InvalidInput: En-tête ou ligne invalide
    """
    reader = csv.DictReader(_open(source))
    if reader.fieldnames != ["region", "year", "gco2e_per_kwh"]:
        raise InvalidInput(f"annual table header must be region,year,gco2e_per_kwh, got {reader.fieldnames}")

    table: dict[tuple[str, int], CarbonIntensity] = {}
    for line, row in enumerate(reader, start=2):
        try:
            entry = CarbonIntensity(
                region=row["region"].strip(),
                year=int(row["year"]),
                value=float(row["gco2e_per_kwh"]),
                source=label,
            )
        except (TypeError, ValueError) as e:
            raise InvalidInput(f"annual table line {line}: {e}") from e
        table[(entry.region, entry.year)] = entry
    return table


BUNDLED_TABLE: dict[tuple[str, int], CarbonIntensity] = load_annual_csv(BUNDLED_TABLE_PATH, label="bundled")


def load_series_csv(source: Union[str, Path, TextIO], region: str, end: datetime | None = None) -> CarbonIntensitySeries:
    """
    Lit une série `timestamp,gco2e_per_kwh` (horodatages ISO-8601 UTC)

    Raises:
        InvalidInput: En-tête ou ligne invalide, série non croissante
    """
    reader = csv.DictReader(_open(source))
    if reader.fieldnames != ["timestamp", "gco2e_per_kwh"]:
        raise InvalidInput(f"series header must be timestamp,gco2e_per_kwh, got {reader.fieldnames}")

    samples = []
    for line, row in enumerate(reader, start=2):
        try:
            ts = datetime.fromisoformat(row["timestamp"].strip().replace("Z", "+00:00"))
            samples.append((ts, float(row["gco2e_per_kwh"])))
        except (TypeError, ValueError) as e:
            raise InvalidInput(f"series line {line}: {e}") from e

    try:
        return CarbonIntensitySeries(region=region, samples=tuple(samples), end=end)
    except ValueError as e:
        raise InvalidInput(f"carbon intensity series: {e}") from e


def series_value_at(series: CarbonIntensitySeries, when: datetime) -> float:
    """
    Valeur de l'intervalle [t_i, t_i+1) qui contient `when`

    Raises:
        TimestampOutOfRange: `when` hors de la couverture de la série
    """
    when = as_utc(when)
    if when < series.start or when >= series.coverage_end:
        raise TimestampOutOfRange(
            f"{when.isoformat()} outside series coverage "
            f"[{series.start.isoformat()}, {series.coverage_end.isoformat()})"
        )
    timestamps = [ts for ts, _ in series.samples]
    idx = bisect.bisect_right(timestamps, when) - 1
    return series.samples[idx][1]


def ci_lookup(
    source: Union[AnnualTable, CarbonIntensitySeries, None],
    region: str,
    when: Union[int, datetime],
) -> float:
    """
    Intensité carbone d'une région à une date

    Args:
        source: Table annuelle, série temporelle, ou None pour la table embarquée
        region: Identifiant de région (ex. "DE")
        when: Année, ou horodatage (pour une table annuelle, l'année de
            l'horodatage est utilisée)

    Returns:
        float: gCO2e/kWh

    Raises:
        UnknownRegion: Région (ou année) absente des données
        TimestampOutOfRange: Horodatage hors de la couverture d'une série
    """
    if isinstance(source, CarbonIntensitySeries):
        if source.region != region:
            raise UnknownRegion(region)
        if isinstance(when, int):
            raise TimestampOutOfRange("a time series lookup needs a timestamp, not a year")
        return series_value_at(source, when)

    table = BUNDLED_TABLE if source is None else source
    year = when.year if isinstance(when, datetime) else when
    entry = table.get((region, year))
    if entry is None:
        raise UnknownRegion(region, year)
    return entry.value


def rank_regions(
    regions: Iterable[str],
    year: int,
    energy_kwh: float = 0.0,
    pue: float = 1.0,
    table: AnnualTable | None = None,
) -> list[RegionEmissions]:
    """
    Classe des régions candidates par intensité carbone croissante

    Sert au choix spatial d'une région d'exécution ; égalités départagées par
    identifiant de région. Les émissions sont celles d'un run de energy_kwh
    (avant PUE) dans chaque région.

    Raises:
        UnknownRegion: Une région candidate n'a pas de donnée pour l'année
        InvalidPue: Si pue < 1
    """
    table = BUNDLED_TABLE if table is None else table
    ranked = []
    for region in sorted(set(regions)):
        entry = table.get((region, year))
        if entry is None:
            raise UnknownRegion(region, year)
        ranked.append(RegionEmissions(
            region=region,
            year=year,
            ci_gco2e_per_kwh=entry.value,
            emissions_g=operational_emissions(energy_kwh, pue, entry.value),
        ))
    ranked.sort(key=lambda r: (r.ci_gco2e_per_kwh, r.region))
    logger.debug("régions classées", year=year, best=ranked[0].region if ranked else None)
    return ranked
