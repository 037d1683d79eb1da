"""
Estimations de durée et d'énergie par (tâche, nœud)
"""

import structlog

from app.core.errors import MissingCostEntry
from app.model.schemas import ClusterSpec, NodeSpec, TaskSpec, WorkflowDag
from app.power.schemas import ComponentCoefficients
from app.power.service import attributed_cpu_power, energy, per_core_power
from app.sched.schemas import EstimateTable, TaskNodeEstimate

logger = structlog.get_logger(__name__)


def fits_on(task: TaskSpec, node: NodeSpec) -> bool:
    """La tâche tient-elle sur le nœud (cœurs et mémoire) ?"""
    if task.cores_required > node.virtual_cores:
        return False
    return task.memory_gb_required == 0 or task.memory_gb_required <= node.memory_gb


def cpu_power_split(node: NodeSpec, cores: int, utilisation: float) -> tuple[float, float]:
    """
    Parts statique et dynamique de la puissance CPU attribuée

    Returns:
        tuple: (static_w, dynamic_w)
    """
    if node.per_core is not None:
        static_w = per_core_power(node.per_core, cores, 0.0)
        return static_w, per_core_power(node.per_core, cores, utilisation) - static_w
    static_w = attributed_cpu_power(node.cpu, node.virtual_cores, cores, 0.0)
    return static_w, attributed_cpu_power(node.cpu, node.virtual_cores, cores, utilisation) - static_w


def task_node_estimate(task: TaskSpec, node: NodeSpec, coeffs: ComponentCoefficients) -> TaskNodeEstimate:
    """
    Estimation d'une tâche sur un nœud

    Raises:
        MissingCostEntry: La table de coûts ne couvre pas ce nœud
    """
    entry = task.cost_table.get(node.id)
    if entry is None:
        raise MissingCostEntry(task.id, node.id)

    static_w, dynamic_w = cpu_power_split(node, task.cores_required, entry.mean_cpu_utilisation)
    memory_w = task.memory_gb_required * coeffs.memory_w_per_gb
    return TaskNodeEstimate(
        runtime_s=entry.runtime_s,
        energy_wh=energy(static_w + dynamic_w + memory_w, entry.runtime_s),
        utilisation=entry.mean_cpu_utilisation,
        static_w=static_w,
        dynamic_w=dynamic_w,
        memory_w=memory_w,
    )


def task_node_estimates(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    coeffs: ComponentCoefficients | None = None,
) -> EstimateTable:
    """
    Table des estimations pour toutes les paires (tâche, nœud) faisables

    Args:
        dag: Workflow
        cluster: Cluster cible
        coeffs: Coefficients mémoire (jeu par défaut si None)

    Returns:
        EstimateTable: Les nœuds trop petits pour une tâche sont omis

    Raises:
        MissingCostEntry: Paire faisable sans entrée dans cost_table
    """
    coeffs = coeffs or ComponentCoefficients()
    nodes = sorted(cluster.nodes, key=lambda n: n.id)
    entries: dict[str, dict[str, TaskNodeEstimate]] = {}

    for task in sorted(dag.tasks, key=lambda t: t.id):
        entries[task.id] = {
            node.id: task_node_estimate(task, node, coeffs)
            for node in nodes
            if fits_on(task, node)
        }

    logger.debug("estimations calculées", tasks=len(entries), nodes=len(nodes))
    return EstimateTable(entries=entries)
