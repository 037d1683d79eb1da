"""
Lecture et écriture des traces canoniques (CSV et JSON)

Colonnes : task_id,task_name,node_id,realtime_s,allocated_cores,pcpu,
peak_rss_gb,read_mb,write_mb,start_time

`pcpu` suit la convention des gestionnaires de workflows : un nombre nu est
un pourcentage d'un cœur (167.5 = 1.675 cœur), converti en fraction des
cœurs alloués par pcpu / (100 * allocated_cores). Une valeur suffixée par
`%` est déjà un pourcentage par cœur alloué ("83.75%" -> 0.8375).
"""

import csv
import io
import json
from datetime import datetime
from decimal import Decimal, InvalidOperation
from typing import Any, Optional, TextIO, Union

import structlog

from app.core.config import settings
from app.core.errors import MalformedRow, UnknownFormat
from app.trace.schemas import RunTrace, TraceMetadata, TraceRecord

logger = structlog.get_logger(__name__)

COLUMNS = [
    "task_id", "task_name", "node_id", "realtime_s", "allocated_cores",
    "pcpu", "peak_rss_gb", "read_mb", "write_mb", "start_time",
]
REQUIRED = ("task_id", "task_name", "node_id", "realtime_s", "allocated_cores")

FORMATS = ("canonical-csv", "canonical-json")


def _is_missing(value: Any) -> bool:
    return value is None or (isinstance(value, str) and value.strip() == "")


def _non_negative(value: Any, field: str, line: int) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise MalformedRow(line, f"{field} is not a number: {value!r}")
    if number != number or number < 0:
        raise MalformedRow(line, f"{field} must be >= 0, got {value!r}")
    return number


def parse_pcpu(value: Union[str, int, float], allocated_cores: int, line: int) -> float:
    """
    Convertit un champ pcpu en fraction des cœurs alloués

    Raises:
        MalformedRow: Valeur non numérique ou négative
    """
    text = str(value).strip()
    per_allocated = text.endswith("%")
    if per_allocated:
        text = text[:-1].strip()
    try:
        number = Decimal(text)
    except InvalidOperation:
        raise MalformedRow(line, f"pcpu is not a number: {value!r}")
    if not number.is_finite() or number < 0:
        raise MalformedRow(line, f"pcpu must be >= 0, got {value!r}")

    if per_allocated:
        return float(number / 100)
    return float(number / (100 * allocated_cores))


def format_pcpu(utilisation: float) -> str:
    """Écrit une utilisation sous forme de pourcentage par cœur alloué ("83.75%")"""
    return format((Decimal(repr(utilisation)) * 100).normalize(), "f") + "%"


def decode_trace(data: bytes) -> str:
    """
    Décode une trace lue en binaire

    Raises:
        MalformedRow: Octets qui ne sont pas de l'UTF-8, avec la ligne fautive
    """
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise MalformedRow(data[: e.start].count(b"\n") + 1, "not valid UTF-8") from e


def _record_from_row(row: dict[str, Any], line: int) -> TraceRecord:
    for field in REQUIRED:
        if _is_missing(row.get(field)):
            raise MalformedRow(line, f"missing required field {field}")

    realtime_s = _non_negative(row["realtime_s"], "realtime_s", line)
    try:
        cores = int(str(row["allocated_cores"]).strip())
    except ValueError:
        raise MalformedRow(line, f"allocated_cores is not an integer: {row['allocated_cores']!r}")
    if cores < 1:
        raise MalformedRow(line, f"allocated_cores must be >= 1, got {cores}")

    defaults: list[str] = []

    if _is_missing(row.get("pcpu")):
        utilisation = settings.DEFAULT_UTILISATION
        defaults.append("cpu_utilisation")
    else:
        utilisation = parse_pcpu(row["pcpu"], cores, line)

    def optional_number(key: str, name: str) -> float:
        if _is_missing(row.get(key)):
            defaults.append(name)
            return 0.0
        return _non_negative(row[key], key, line)

    memory = optional_number("peak_rss_gb", "peak_memory_gb")
    read_mb = optional_number("read_mb", "read_mb")
    write_mb = optional_number("write_mb", "write_mb")

    start_time: Optional[datetime] = None
    if _is_missing(row.get("start_time")):
        defaults.append("start_time")
    else:
        try:
            start_time = datetime.fromisoformat(str(row["start_time"]).strip().replace("Z", "+00:00"))
        except ValueError:
            raise MalformedRow(line, f"start_time is not ISO-8601: {row['start_time']!r}")

    return TraceRecord(
        task_id=str(row["task_id"]).strip(),
        task_name=str(row["task_name"]).strip(),
        node_id=str(row["node_id"]).strip(),
        realtime_s=realtime_s,
        allocated_cores=cores,
        cpu_utilisation=utilisation,
        peak_memory_gb=memory,
        read_mb=read_mb,
        write_mb=write_mb,
        start_time=start_time,
        defaults_applied=tuple(defaults),
    )


def _parse_csv(stream: TextIO) -> list[tuple[int, TraceRecord]]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        return []
    if [h.strip() for h in header] != COLUMNS:
        raise MalformedRow(1, f"header must be exactly {','.join(COLUMNS)}")

    records = []
    for values in reader:
        line = reader.line_num
        if not values or all(v.strip() == "" for v in values):
            continue
        if len(values) != len(COLUMNS):
            raise MalformedRow(line, f"expected {len(COLUMNS)} fields, got {len(values)}")
        records.append((line, _record_from_row(dict(zip(COLUMNS, values)), line)))
    return records


def _parse_json(stream: TextIO) -> list[tuple[int, TraceRecord]]:
    try:
        data = json.load(stream)
    except json.JSONDecodeError as e:
        raise MalformedRow(e.lineno, f"invalid JSON: {e.msg}")
    if not isinstance(data, list):
        raise MalformedRow(1, "canonical JSON trace must be an array of objects")

    records = []
    for index, item in enumerate(data, start=1):
        if not isinstance(item, dict):
            raise MalformedRow(index, "trace entries must be objects")
        unknown = sorted(set(item) - set(COLUMNS))
        if unknown:
            raise MalformedRow(index, f"unknown fields: {', '.join(unknown)}")
        records.append((index, _record_from_row(item, index)))
    return records


def parse_trace(
    source: Union[TextIO, str],
    format: str = "canonical-csv",
    metadata: Optional[TraceMetadata] = None,
) -> RunTrace:
    """
    Lit une trace canonique

    Args:
        source: Flux texte ou contenu de la trace
        format: "canonical-csv" ou "canonical-json"
        metadata: Métadonnées du run (nom du workflow, cluster, date)

    Returns:
        RunTrace: Enregistrements dans l'ordre du fichier

    Raises:
        MalformedRow: Ligne invalide (numéro de ligne, raison)
        UnknownFormat: Format non supporté
    """
    if format not in FORMATS:
        raise UnknownFormat(format)
    stream = io.StringIO(source) if isinstance(source, str) else source

    parsed = _parse_csv(stream) if format == "canonical-csv" else _parse_json(stream)

    seen: set[str] = set()
    for line, record in parsed:
        if record.task_id in seen:
            raise MalformedRow(line, f"duplicate task_id {record.task_id}")
        seen.add(record.task_id)

    defaulted = sum(1 for _, r in parsed if r.defaults_applied)
    if defaulted:
        logger.info("valeurs par défaut appliquées", records=defaulted, total=len(parsed))

    return RunTrace(records=tuple(r for _, r in parsed), metadata=metadata or TraceMetadata())


def _row_for(record: TraceRecord) -> dict[str, Any]:
    defaults = set(record.defaults_applied)
    return {
        "task_id": record.task_id,
        "task_name": record.task_name,
        "node_id": record.node_id,
        "realtime_s": record.realtime_s,
        "allocated_cores": record.allocated_cores,
        "pcpu": None if "cpu_utilisation" in defaults else format_pcpu(record.cpu_utilisation),
        "peak_rss_gb": None if "peak_memory_gb" in defaults else record.peak_memory_gb,
        "read_mb": None if "read_mb" in defaults else record.read_mb,
        "write_mb": None if "write_mb" in defaults else record.write_mb,
        "start_time": record.start_time.isoformat() if record.start_time else None,
    }


def serialise_trace(trace: RunTrace, format: str = "canonical-csv") -> str:
    """
    Écrit une trace au format canonique ; inverse de parse_trace

    Les champs remplacés par défaut à la lecture sont laissés vides.
    """
    if format not in FORMATS:
        raise UnknownFormat(format)
    rows = [_row_for(r) for r in trace.records]

    if format == "canonical-json":
        return json.dumps(rows, indent=2) + "\n"

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(["" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else row[c]) for c in COLUMNS])
    return out.getvalue()
