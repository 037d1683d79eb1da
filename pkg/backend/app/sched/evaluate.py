"""
Évaluateur commun des objectifs d'un ordonnancement

Recalcule la durée totale et l'énergie à partir des estimations et signale
toute violation (tâche manquante, nœud inconnu, précédence, capacité).
"""

import math
from collections.abc import Mapping

import networkx as nx
import structlog

from app.core.errors import InvalidSchedule
from app.model.dag import validate_dag
from app.model.schemas import ClusterSpec, NodeSpec, WorkflowDag
from app.power.service import energy
from app.sched.dvfs import scale_estimate
from app.sched.mapping import fits_interval
from app.sched.rank import transfer_time
from app.sched.schemas import EstimateTable, Evaluation, Schedule

logger = structlog.get_logger(__name__)

TOLERANCE = 1e-9


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=TOLERANCE, abs_tol=TOLERANCE)


def node_static_w(node: NodeSpec) -> float:
    """Puissance statique CPU du nœud entier"""
    if node.per_core is not None:
        return node.per_core.min_w_per_core * node.virtual_cores
    return node.cpu.static_w


def idle_energy_wh(static_share: Mapping[str, float], makespan_s: float, nodes: Mapping[str, NodeSpec]) -> float:
    """
    Énergie statique des nœuds allumés en dehors de leurs tâches

    Args:
        static_share: Énergie statique (Wh) déjà attribuée aux tâches, par nœud allumé
        makespan_s: Les nœuds allumés le restent jusqu'à la fin de l'ordonnancement
        nodes: Spécifications par identifiant
    """
    return sum(
        max(0.0, energy(node_static_w(nodes[node_id]), makespan_s) - static_share[node_id])
        for node_id in sorted(static_share)
    )


def evaluate_schedule(
    schedule: Schedule,
    dag: WorkflowDag,
    cluster: ClusterSpec,
    estimates: EstimateTable,
    comm_rate: float = 0.0,
    idle_accounting: bool | None = None,
    alpha: float | None = None,
) -> Evaluation:
    """
    Vérifie un ordonnancement et recalcule ses objectifs

    Args:
        schedule: Ordonnancement à évaluer
        dag: Workflow
        cluster: Cluster cible
        estimates: Estimations par (tâche, nœud)
        comm_rate: Débit de transfert (Mo/s, 0 = gratuit)
        idle_accounting: Ajoute l'énergie statique des nœuds allumés pendant
            leurs périodes d'inactivité ; par défaut le mode de l'ordonnancement
        alpha: Exposant DVFS pour les affectations à fréquence réduite

    Returns:
        Evaluation: Durée totale et énergie recalculées

    Raises:
        InvalidSchedule: Au premier invariant violé
    """
    idle_accounting = schedule.idle_accounting if idle_accounting is None else idle_accounting
    graph: nx.DiGraph = validate_dag(dag)
    tasks = {t.id: t for t in dag.tasks}
    assignments = schedule.assignments

    missing = sorted(set(tasks) - set(assignments))
    if missing:
        raise InvalidSchedule(f"tasks not scheduled: {', '.join(missing)}")
    extra = sorted(set(assignments) - set(tasks))
    if extra:
        raise InvalidSchedule(f"assignments for unknown tasks: {', '.join(extra)}")

    nodes = {n.id: n for n in cluster.nodes}
    task_energy = 0.0
    static_share: dict[str, float] = {}
    for task_id in sorted(assignments):
        a = assignments[task_id]
        node = nodes.get(a.node_id)
        if node is None:
            raise InvalidSchedule(f"task '{task_id}' assigned to unknown node '{a.node_id}'")
        if not estimates.has(task_id, a.node_id):
            raise InvalidSchedule(f"task '{task_id}' does not fit on node '{a.node_id}'")
        if a.frequency_ratio not in node.max_frequency_ratio:
            raise InvalidSchedule(
                f"frequency ratio {a.frequency_ratio} not available on node '{a.node_id}'"
            )

        estimate = estimates.get(task_id, a.node_id)
        runtime, task_wh = scale_estimate(estimate, tasks[task_id].cpu_bound_fraction, a.frequency_ratio, alpha)
        if not _close(a.finish_s - a.start_s, runtime):
            raise InvalidSchedule(
                f"task '{task_id}' lasts {a.finish_s - a.start_s} s on '{a.node_id}', expected {runtime} s"
            )
        task_energy += task_wh
        static_share[a.node_id] = static_share.get(a.node_id, 0.0) + energy(estimate.static_w, runtime)

    for producer, consumer, data in sorted(graph.edges(data=True)):
        before, after = assignments[producer], assignments[consumer]
        ready = before.finish_s
        if before.node_id != after.node_id:
            ready += transfer_time(data["data_size_mb"], comm_rate)
        if after.start_s < ready and not _close(after.start_s, ready):
            raise InvalidSchedule(
                f"task '{consumer}' starts at {after.start_s} s before '{producer}' data is ready at {ready} s"
            )

    for node_id in sorted(static_share):
        placed = [
            (a.start_s, a.finish_s, tasks[t].cores_required)
            for t, a in sorted(assignments.items())
            if a.node_id == node_id
        ]
        for i, (start, finish, cores) in enumerate(placed):
            others = placed[:i] + placed[i + 1:]
            if not fits_interval(others, start, finish, cores, nodes[node_id].virtual_cores):
                raise InvalidSchedule(f"node '{node_id}' exceeds its {nodes[node_id].virtual_cores} cores")

    makespan = max((a.finish_s for a in assignments.values()), default=0.0)
    idle_energy = idle_energy_wh(static_share, makespan, nodes) if idle_accounting else 0.0

    if not _close(schedule.makespan_s, makespan):
        raise InvalidSchedule(f"reported makespan {schedule.makespan_s} s, recomputed {makespan} s")
    if schedule.idle_accounting and not idle_accounting:
        raise InvalidSchedule("schedule energy includes idle energy; evaluate with idle accounting on")
    reported = task_energy + (idle_energy if schedule.idle_accounting else 0.0)
    if not _close(schedule.energy_wh, reported):
        raise InvalidSchedule(f"reported energy {schedule.energy_wh} Wh, recomputed {reported} Wh")

    logger.debug("ordonnancement évalué", makespan_s=makespan, energy_wh=task_energy + idle_energy)
    return Evaluation(
        makespan_s=makespan,
        energy_wh=task_energy + idle_energy,
        idle_energy_wh=idle_energy,
        idle_accounting=idle_accounting,
    )


def with_idle_accounting(
    schedule: Schedule,
    dag: WorkflowDag,
    cluster: ClusterSpec,
    estimates: EstimateTable,
    comm_rate: float = 0.0,
) -> Schedule:
    """Copie de l'ordonnancement dont l'énergie inclut l'inactivité des nœuds allumés"""
    result = evaluate_schedule(schedule, dag, cluster, estimates, comm_rate, idle_accounting=True)
    return schedule.model_copy(update={"energy_wh": result.energy_wh, "idle_accounting": True})
