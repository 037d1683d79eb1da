"""
Rendu des rapports : texte, JSON et CSV

Le texte arrondit à 3 chiffres significatifs, le JSON garde la précision
complète et les unités, le CSV est tabulaire.
"""

import csv
import io
import math
from typing import Any, Callable, Literal

from pydantic import BaseModel

from app.carbon.shifting import ShiftResult
from app.estimate.schemas import FootprintReport, ReportComparison, StorageYearEstimate
from app.model.units import Quantity, Unit
from app.sched.schemas import ConsolidationResult, DvfsSweep, ParetoFront, Schedule, ScheduleResult

OutputFormat = Literal["text", "json", "csv"]


def sig3(value: float) -> str:
    """Arrondi à 3 chiffres significatifs, zéros de fin conservés (9.9 -> "9.90")"""
    if value == 0 or not math.isfinite(value):
        return "0" if value == 0 else str(value)
    decimals = 2 - math.floor(math.log10(abs(value)))
    rounded = round(value, decimals)
    # 9.996 -> 10.0 : un chiffre de plus avant la virgule
    decimals = 2 - math.floor(math.log10(abs(rounded)))
    rounded = round(value, decimals)
    return f"{rounded:.{max(decimals, 0)}f}"


def energy_text(wh: float) -> str:
    """Wh sous 1 kWh, kWh au-delà"""
    if abs(wh) < 1000:
        return f"{sig3(wh)} Wh"
    return f"{sig3(wh / 1000.0)} kWh"


def emissions_text(g: float) -> str:
    """g CO2e sous 1 kg, kg CO2e au-delà"""
    if abs(g) < 1000:
        return f"{sig3(g)} g CO2e"
    return f"{sig3(g / 1000.0)} kg CO2e"


def quantity_text(q: Quantity) -> str:
    if q.unit == Unit.W:
        return f"{sig3(q.value)} W"
    if q.unit in (Unit.WH, Unit.KWH):
        return energy_text(q.to(Unit.WH).value)
    if q.unit in (Unit.G_CO2E, Unit.KG_CO2E):
        return emissions_text(q.to(Unit.G_CO2E).value)
    return str(q)


def _csv(header: list[str], rows: list[list[Any]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _ratio_text(value: float | None) -> str:
    return "undefined" if value is None else sig3(value)


# --- Texte ---

def _footprint_text(report: FootprintReport, assumptions: bool) -> str:
    t = report.totals
    lines = [
        f"kind: {report.kind}" + (" (lower bound: CPU only)" if report.lower_bound else ""),
        f"cpu: {quantity_text(t.cpu)}",
        f"memory: {quantity_text(t.memory)}",
        f"storage: {quantity_text(t.storage)}",
        f"total: {quantity_text(t.energy_total)}",
        f"total with PUE {report.pue}: {quantity_text(t.energy_with_pue)}",
        f"carbon intensity: {sig3(report.ci_gco2e_per_kwh)} gCO2e/kWh",
        f"emissions: {quantity_text(t.operational)}",
    ]
    if t.embodied is not None:
        lines.append(f"embodied: {quantity_text(t.embodied)}")
    if report.repetitions > 1:
        lines.append(f"repetitions: {report.repetitions}")
    if report.kind == "trace":
        lines.append("tasks:")
        for task in report.tasks:
            lines.append(
                f"  {task.task_id} on {task.node_id}: "
                f"{energy_text(task.energy_wh_total)}, {emissions_text(task.emissions_g)}"
            )
        lines.append("by task name:")
        for name, group in report.task_groups.items():
            lines.append(
                f"  {name}: {group.count} runs, {sig3(group.total_cpu_core_seconds)} core-s, "
                f"mean utilisation {sig3(group.mean_utilisation)}, max memory {sig3(group.max_memory_gb)} GB"
            )
    if assumptions:
        lines.append("assumptions:")
        lines.extend(f"  - {a}" for a in report.assumptions)
    return "\n".join(lines) + "\n"


def _storage_text(estimate: StorageYearEstimate) -> str:
    return "\n".join([
        f"storage: {sig3(estimate.capacity_tb)} TB SSD",
        f"energy per year: {quantity_text(estimate.energy_per_year)}",
        f"energy per year with PUE: {quantity_text(estimate.energy_per_year_with_pue)}",
        f"emissions per year: {quantity_text(estimate.emissions_per_year)}",
        f"tape emissions per year: {quantity_text(estimate.tape_emissions_per_year)}",
        f"SSD embodied: {quantity_text(estimate.ssd_embodied)}",
    ]) + "\n"


def _comparison_text(c: ReportComparison) -> str:
    return "\n".join(
        f"{name} ratio: {_ratio_text(getattr(c, name))}"
        for name in ("cpu", "memory", "storage", "energy_total", "energy_with_pue", "emissions")
    ) + "\n"


def _schedule_lines(schedule: Schedule) -> list[str]:
    lines = [
        f"makespan: {sig3(schedule.makespan_s)} s",
        f"energy: {energy_text(schedule.energy_wh)}" + (" (idle included)" if schedule.idle_accounting else ""),
    ]
    for task_id, a in schedule.assignments.items():
        ratio = f" at f={a.frequency_ratio}" if a.frequency_ratio != 1.0 else ""
        lines.append(f"  {task_id} -> {a.node_id} [{sig3(a.start_s)}, {sig3(a.finish_s)}] s{ratio}")
    return lines


def _schedule_text(schedule: Schedule) -> str:
    return "\n".join([f"algorithm: {schedule.algorithm}"] + _schedule_lines(schedule)) + "\n"


def _front_text(front: ParetoFront) -> str:
    lines = [f"pareto front: {len(front.solutions)} solutions"]
    for i, schedule in enumerate(front.solutions, start=1):
        lines.append(f"solution {i}:")
        lines.extend("  " + line for line in _schedule_lines(schedule))
    return "\n".join(lines) + "\n"


def _shift_text(result: ShiftResult) -> str:
    return "\n".join([
        f"best start: {result.start.isoformat()}",
        f"energy: {energy_text(result.energy_kwh * 1000.0)}",
        f"emissions: {emissions_text(result.emissions_g)}",
        f"baseline start: {result.baseline_start.isoformat()}",
        f"baseline emissions: {emissions_text(result.baseline_emissions_g)}",
        f"savings: {emissions_text(result.savings_g)}",
        f"candidates: {result.candidates}",
    ]) + "\n"


def _dvfs_text(sweep: DvfsSweep) -> str:
    lines = [
        f"f={r.frequency_ratio}: runtime {sig3(r.runtime_s)} s, {sig3(r.watts)} W, {energy_text(r.energy_wh)}"
        for r in sweep.results
    ]
    lines.append(f"best ratio: {sweep.best_ratio}")
    return "\n".join(lines) + "\n"


def _consolidation_text(result: ConsolidationResult) -> str:
    lines = [
        f"nodes powered: {result.nodes_powered} (spread: {result.spread_nodes})",
        f"consolidated energy: {energy_text(result.consolidated_energy_wh)}",
        f"spread energy: {energy_text(result.spread_energy_wh)}",
        f"energy saved: {energy_text(result.energy_delta_wh)}",
    ]
    lines.extend(f"  task {idx} -> {node}" for idx, node in result.packing.items())
    return "\n".join(lines) + "\n"


# --- CSV ---

FOOTPRINT_COLUMNS = [
    "task_id", "node_id", "duration_s", "cpu_wh", "memory_wh", "storage_wh",
    "energy_wh", "energy_wh_with_pue", "emissions_g",
]


def _footprint_csv(report: FootprintReport) -> str:
    return _csv(FOOTPRINT_COLUMNS, [
        [t.task_id, t.node_id, repr(t.duration_s), repr(t.energy_wh.cpu_wh), repr(t.energy_wh.memory_wh),
         repr(t.energy_wh.storage_wh), repr(t.energy_wh_total), repr(t.energy_wh_with_pue), repr(t.emissions_g)]
        for t in report.tasks
    ])


def _gantt_rows(schedule: Schedule) -> list[list[Any]]:
    ordered = sorted(schedule.assignments.items(), key=lambda kv: (kv[1].start_s, kv[0]))
    return [[task_id, a.node_id, repr(a.start_s), repr(a.finish_s)] for task_id, a in ordered]


def _schedule_csv(schedule: Schedule) -> str:
    return _csv(["task", "node", "start_s", "finish_s"], _gantt_rows(schedule))


def _front_csv(front: ParetoFront) -> str:
    rows = []
    for i, schedule in enumerate(front.solutions, start=1):
        rows.extend([i] + row for row in _gantt_rows(schedule))
    return _csv(["solution", "task", "node", "start_s", "finish_s"], rows)


def _fields_csv(model: BaseModel) -> str:
    data = model.model_dump(mode="json")
    flat = {k: (v["value"] if isinstance(v, dict) and "value" in v else v) for k, v in data.items()}
    return _csv(list(flat), [[flat[k] for k in flat]])


def _dvfs_csv(sweep: DvfsSweep) -> str:
    return _csv(
        ["frequency_ratio", "runtime_s", "watts", "energy_wh"],
        [[repr(r.frequency_ratio), repr(r.runtime_s), repr(r.watts), repr(r.energy_wh)] for r in sweep.results],
    )


def _consolidation_csv(result: ConsolidationResult) -> str:
    return _csv(["task", "node"], [[idx, node] for idx, node in result.packing.items()])


TEXT: dict[type, Callable[..., str]] = {
    StorageYearEstimate: _storage_text,
    ReportComparison: _comparison_text,
    Schedule: _schedule_text,
    ParetoFront: _front_text,
    ShiftResult: _shift_text,
    DvfsSweep: _dvfs_text,
    ConsolidationResult: _consolidation_text,
}

CSV: dict[type, Callable[..., str]] = {
    FootprintReport: _footprint_csv,
    Schedule: _schedule_csv,
    ParetoFront: _front_csv,
    DvfsSweep: _dvfs_csv,
    ConsolidationResult: _consolidation_csv,
}


def render_report(report: BaseModel, format: OutputFormat = "text", assumptions: bool = False) -> str:
    """
    Rend un rapport dans le format demandé

    Args:
        report: FootprintReport, Schedule, ParetoFront, ScheduleResult ou
            tout autre résultat de la CLI
        format: text, json ou csv
        assumptions: Ajoute le journal des hypothèses au texte

    Returns:
        str: Rendu terminé par un saut de ligne
    """
    if format == "json":
        return report.model_dump_json(indent=2) + "\n"
    if isinstance(report, ScheduleResult):
        report = report.schedule if report.schedule is not None else report.front
    if format == "csv":
        return CSV.get(type(report), _fields_csv)(report)
    if isinstance(report, FootprintReport):
        return _footprint_text(report, assumptions)
    return TEXT[type(report)](report)
