"""
Service d'estimation - Logique métier

Combine descriptions de run, spécifications de nœuds, coefficients, PUE et
intensité carbone en rapports d'empreinte :
- run global (n nœuds dédiés pendant une durée)
- heures-cœur avec un modèle de puissance par cœur
- trace d'exécution, tâche par tâche
"""

from collections import Counter
from datetime import datetime
from typing import Optional, Union

import structlog

from app.carbon.accounting import (
    embodied_share,
    operational_emissions,
    ssd_embodied,
    tape_storage_year,
)
from app.carbon.intensity import AnnualTable, ci_lookup
from app.carbon.schemas import CarbonIntensitySeries, EmbodiedProfile
from app.core.config import settings
from app.core.errors import InvalidInput, InvalidPue, UnknownNode
from app.estimate.schemas import (
    BulkRun,
    ComponentEnergy,
    CoreHoursRun,
    EstimateContext,
    FootprintReport,
    MemoryAttribution,
    ReportComparison,
    RunTotals,
    StorageYearEstimate,
    TaskFootprint,
)
from app.model.schemas import ClusterSpec, NodeSpec
from app.model.units import Quantity, Unit, grams, watt_hours
from app.power.schemas import ComponentCoefficients
from app.power.service import (
    attributed_cpu_power,
    clamp_utilisation,
    component_power,
    energy,
    load_coefficients,
    per_core_power,
    total_power,
)
from app.trace.aggregate import aggregate_by_task_name
from app.trace.schemas import RunTrace, TraceRecord

logger = structlog.get_logger(__name__)

HOURS_PER_YEAR = 8760


def _footprint(
    task_id: str,
    node_id: str,
    duration_s: float,
    components: ComponentEnergy,
    pue: float,
    ci: float,
) -> TaskFootprint:
    total = components.total_wh
    return TaskFootprint(
        task_id=task_id,
        node_id=node_id,
        duration_s=duration_s,
        energy_wh=components,
        energy_wh_total=total,
        energy_wh_with_pue=total * pue,
        emissions_g=operational_emissions(total / 1000.0, pue, ci),
    )


def _totals(tasks: list[TaskFootprint], pue: float, ci: float, embodied_g: Optional[float]) -> RunTotals:
    cpu = watt_hours(sum(t.energy_wh.cpu_wh for t in tasks))
    memory = watt_hours(sum(t.energy_wh.memory_wh for t in tasks))
    storage = watt_hours(sum(t.energy_wh.storage_wh for t in tasks))
    total = cpu + memory + storage
    return RunTotals(
        cpu=cpu,
        memory=memory,
        storage=storage,
        energy_total=total,
        energy_with_pue=total * pue,
        operational=grams(operational_emissions(total.to(Unit.KWH).value, pue, ci)),
        embodied=None if embodied_g is None else grams(embodied_g),
    )


def _context_assumptions(ctx: EstimateContext) -> list[str]:
    notes = [f"coefficient set: {ctx.coefficient_set}", f"PUE: {ctx.pue}"]
    notes.append(f"carbon intensity: {ctx.ci} gCO2e/kWh" + (f" ({ctx.ci_source})" if ctx.ci_source else ""))
    return notes


def node_cpu_power(node: NodeSpec, allocated_cores: int, utilisation: float) -> float:
    """
    Puissance CPU d'une allocation sur un nœud

    Les instances cloud (modèle par cœur) n'ont pas de part statique
    séparée ; les nœuds de cluster répartissent statique et dynamique au
    prorata des cœurs alloués.
    """
    if node.per_core is not None:
        return per_core_power(node.per_core, allocated_cores, utilisation)
    return attributed_cpu_power(node.cpu, node.virtual_cores, allocated_cores, utilisation)


def estimate_bulk(
    run: BulkRun,
    node: NodeSpec,
    ctx: EstimateContext,
    repetitions: int = 1,
) -> FootprintReport:
    """
    Estime un run global : node_count nœuds dédiés pendant duration_s

    Toute la mémoire et tous les disques des nœuds sont attribués au run.
    La part du carbone intrinsèque des nœuds est incluse.

    Args:
        run: Description globale du run
        node: Spécification des nœuds (tous identiques)
        ctx: Coefficients, PUE et intensité carbone
        repetitions: Nombre d'exécutions identiques

    Returns:
        FootprintReport: Rapport avec une seule ligne "bulk"
    """
    if node.per_core is not None:
        cpu_w = per_core_power(node.per_core, node.virtual_cores, run.mean_cpu_utilisation)
    else:
        cpu_w = total_power(node.cpu, run.mean_cpu_utilisation)
    memory_w, storage_w = component_power(node, ctx.coeffs)

    scale = run.node_count * repetitions
    components = ComponentEnergy(
        cpu_wh=energy(cpu_w, run.duration_s) * scale,
        memory_wh=energy(memory_w, run.duration_s) * scale,
        storage_wh=energy(storage_w, run.duration_s) * scale,
    )
    task = _footprint("bulk", node.id, run.duration_s, components, ctx.pue, ctx.ci)

    embodied_kg = embodied_share(
        EmbodiedProfile(embodied_kgco2e=node.embodied_kgco2e, lifetime_years=node.lifetime_years),
        run.duration_s,
        run.node_count,
    ) * repetitions

    assumptions = _context_assumptions(ctx) + [
        "memory attribution: full_node",
        f"{run.node_count} nodes x {run.duration_s} s at utilisation {run.mean_cpu_utilisation}",
        f"embodied share over a {node.lifetime_years}-year lifetime",
    ]
    if repetitions > 1:
        assumptions.append(f"repetitions: {repetitions}")

    logger.debug("estimation globale", node=node.id, nodes=run.node_count, energy_wh=components.total_wh)
    return FootprintReport(
        kind="bulk",
        tasks=(task,),
        totals=_totals([task], ctx.pue, ctx.ci, embodied_kg * 1000.0),
        pue=ctx.pue,
        ci_gco2e_per_kwh=ctx.ci,
        repetitions=repetitions,
        coefficient_set=ctx.coefficient_set,
        assumptions=tuple(assumptions),
    )


def estimate_core_hours(run: CoreHoursRun, ctx: EstimateContext) -> FootprintReport:
    """
    Estime un run décrit en heures-cœur

    Seul le CPU est estimé : le rapport est marqué comme borne inférieure.
    """
    per_core_w = per_core_power(run.per_core, 1, run.utilisation)
    components = ComponentEnergy(cpu_wh=run.core_hours * per_core_w)
    task = _footprint("core-hours", "", run.core_hours * 3600.0, components, ctx.pue, ctx.ci)

    assumptions = _context_assumptions(ctx) + [
        f"{run.core_hours} core-hours at {per_core_w} W per core (utilisation {run.utilisation})",
        "lower bound: only CPU energy is estimated",
    ]
    return FootprintReport(
        kind="core-hours",
        tasks=(task,),
        totals=_totals([task], ctx.pue, ctx.ci, None),
        pue=ctx.pue,
        ci_gco2e_per_kwh=ctx.ci,
        lower_bound=True,
        coefficient_set=ctx.coefficient_set,
        assumptions=tuple(assumptions),
    )


def estimate_task(
    record: TraceRecord,
    node: NodeSpec,
    coeffs: ComponentCoefficients,
    pue: float,
    ci: float,
    memory_attribution: MemoryAttribution = "allocated_gb",
    attribute_storage: bool = False,
) -> TaskFootprint:
    """
    Estime l'empreinte d'une exécution de tâche

    Args:
        record: Exécution observée
        node: Nœud sur lequel la tâche a tourné
        coeffs: Coefficients mémoire/stockage
        pue: PUE du centre de données
        ci: Intensité carbone (gCO2e/kWh)
        memory_attribution: "allocated_gb" (mémoire de la tâche) ou
            "full_node" (toute la mémoire du nœud)
        attribute_storage: Attribuer les disques du nœud (au prorata des
            cœurs, ou en totalité avec full_node)

    Raises:
        UnknownNode: Si la trace désigne un autre nœud
    """
    if record.node_id != node.id:
        raise UnknownNode(record.node_id)

    utilisation = clamp_utilisation(record.cpu_utilisation, source=record.task_id)
    cpu_w = node_cpu_power(node, record.allocated_cores, utilisation)

    memory_gb = node.memory_gb if memory_attribution == "full_node" else record.peak_memory_gb
    memory_w = memory_gb * coeffs.memory_w_per_gb

    storage_w = 0.0
    if attribute_storage:
        _, node_storage_w = component_power(node, coeffs)
        share = 1.0 if memory_attribution == "full_node" else record.allocated_cores / node.virtual_cores
        storage_w = node_storage_w * share

    components = ComponentEnergy(
        cpu_wh=energy(cpu_w, record.realtime_s),
        memory_wh=energy(memory_w, record.realtime_s),
        storage_wh=energy(storage_w, record.realtime_s),
    )
    return _footprint(record.task_id, node.id, record.realtime_s, components, pue, ci)


def estimate_trace(
    trace: RunTrace,
    cluster: ClusterSpec,
    ctx: EstimateContext,
    memory_attribution: MemoryAttribution = "allocated_gb",
    attribute_storage: bool = False,
) -> FootprintReport:
    """
    Estime toutes les exécutions d'une trace

    Les tâches sont indépendantes ; le rapport est assemblé dans l'ordre des
    task_id, quel que soit l'ordre du fichier.

    Raises:
        UnknownNode: Un enregistrement désigne un nœud absent du cluster
    """
    tasks = [
        estimate_task(
            record,
            cluster.node(record.node_id),
            ctx.coeffs,
            ctx.pue,
            ctx.ci,
            memory_attribution=memory_attribution,
            attribute_storage=attribute_storage,
        )
        for record in sorted(trace.records, key=lambda r: r.task_id)
    ]

    assumptions = _context_assumptions(ctx) + [f"memory attribution: {memory_attribution}"]
    if not attribute_storage:
        assumptions.append("storage energy not attributed to tasks")
    assumptions.append("embodied emissions not attributed to tasks on shared nodes")

    defaults = Counter(field for r in trace.records for field in r.defaults_applied)
    for field in sorted(defaults):
        assumptions.append(f"default applied for {field} in {defaults[field]} record(s)")

    return FootprintReport(
        kind="trace",
        tasks=tuple(tasks),
        task_groups=aggregate_by_task_name(trace),
        totals=_totals(tasks, ctx.pue, ctx.ci, None),
        pue=ctx.pue,
        ci_gco2e_per_kwh=ctx.ci,
        coefficient_set=ctx.coefficient_set,
        assumptions=tuple(assumptions),
    )


def storage_year_estimate(
    capacity_tb: float,
    coeffs: ComponentCoefficients,
    pue: float,
    ci: float,
) -> StorageYearEstimate:
    """
    Énergie et émissions d'une année de stockage sur SSD

    Le résultat inclut, pour comparaison, les émissions annuelles d'un
    archivage sur bande et le carbone intrinsèque de la capacité SSD.
    """
    if capacity_tb < 0:
        raise InvalidInput("capacity must be >= 0")
    energy_wh = capacity_tb * coeffs.ssd_w_per_tb * HOURS_PER_YEAR
    return StorageYearEstimate(
        capacity_tb=capacity_tb,
        energy_per_year=Quantity(value=energy_wh, unit=Unit.WH),
        energy_per_year_with_pue=Quantity(value=energy_wh * pue, unit=Unit.WH),
        emissions_per_year=Quantity(value=operational_emissions(energy_wh / 1000.0, pue, ci), unit=Unit.G_CO2E),
        tape_emissions_per_year=Quantity(value=tape_storage_year(capacity_tb) * 1000.0, unit=Unit.G_CO2E),
        ssd_embodied=Quantity(value=ssd_embodied(capacity_tb) * 1000.0, unit=Unit.G_CO2E),
    )


def _ratio(a: float, b: float) -> Optional[float]:
    return None if b == 0 else a / b


def compare_reports(a: FootprintReport, b: FootprintReport) -> ReportComparison:
    """Rapports a/b ; indéfini (None) quand le dénominateur est nul"""
    ta, tb = a.totals, b.totals
    return ReportComparison(
        cpu=_ratio(ta.cpu.value, tb.cpu.value),
        memory=_ratio(ta.memory.value, tb.memory.value),
        storage=_ratio(ta.storage.value, tb.storage.value),
        energy_total=_ratio(ta.energy_total.value, tb.energy_total.value),
        energy_with_pue=_ratio(ta.energy_with_pue.value, tb.energy_with_pue.value),
        emissions=_ratio(ta.operational.value, tb.operational.value),
    )


def trace_start(trace: RunTrace) -> Optional[datetime]:
    """Début du run : premier start_time connu, sinon la date d'exécution"""
    starts = [r.start_time for r in trace.records if r.start_time is not None]
    if starts:
        return min(starts)
    if trace.metadata.execution_date is not None:
        d = trace.metadata.execution_date
        return datetime(d.year, d.month, d.day)
    return None


def resolve_ci(
    ci: Optional[float] = None,
    series: Optional[CarbonIntensitySeries] = None,
    region: Optional[str] = None,
    year: Optional[int] = None,
    start: Optional[datetime] = None,
    table: Optional[AnnualTable] = None,
) -> tuple[float, str]:
    """
    Détermine l'intensité carbone d'un run et décrit sa provenance

    Priorité : valeur explicite, puis série temporelle au démarrage du run,
    puis moyenne annuelle (année explicite, sinon année du démarrage). Un
    run qui chevauche deux années est rattaché à l'année de son démarrage.

    Returns:
        tuple: (gCO2e/kWh, description pour le journal des hypothèses)

    Raises:
        InvalidInput: Aucune source d'intensité carbone exploitable
    """
    if ci is not None:
        if ci < 0:
            raise InvalidInput("carbon intensity must be >= 0")
        return ci, "user-supplied value"
    if series is not None:
        if start is None:
            raise InvalidInput("a carbon intensity series needs the run start time")
        return ci_lookup(series, series.region, start), f"series {series.region} at run start {start.isoformat()}"
    if region:
        when: Union[int, datetime, None] = year if year is not None else start
        if when is None:
            raise InvalidInput(f"no year given for region {region}")
        value = ci_lookup(table, region, when)
        key_year = when if isinstance(when, int) else when.year
        label = f"annual average {region} {key_year}"
        if year is None:
            label += " (keyed on run start)"
        return value, label
    raise InvalidInput("no carbon intensity: give a value, a series or a region")


def build_context(
    pue: Optional[float] = None,
    coefficients: Optional[str] = None,
    ci: Optional[float] = None,
    series: Optional[CarbonIntensitySeries] = None,
    region: Optional[str] = None,
    year: Optional[int] = None,
    start: Optional[datetime] = None,
    table: Optional[AnnualTable] = None,
) -> EstimateContext:
    """
    Assemble coefficients, PUE et intensité carbone d'une estimation

    Args:
        pue: PUE du centre de données (1.0 si absent)
        coefficients: Nom de jeu ou chemin JSON (settings.COEFFICIENT_SET si absent)
        ci, series, region, year, start, table: Voir resolve_ci
    """
    if pue is not None and pue < 1.0:
        raise InvalidPue(pue)
    value, source = resolve_ci(ci=ci, series=series, region=region, year=year, start=start, table=table)
    return EstimateContext(
        coeffs=load_coefficients(coefficients),
        coefficient_set=coefficients or settings.COEFFICIENT_SET,
        pue=1.0 if pue is None else pue,
        ci=value,
        ci_source=source,
    )
