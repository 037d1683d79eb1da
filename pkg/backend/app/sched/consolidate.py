"""
Consolidation : regrouper les tâches sur le moins de nœuds allumés possible

Le placement est statique (toutes les tâches coexistent) ; un nœud reste
allumé jusqu'à la fin de sa tâche la plus longue et un nœud éteint ne
consomme rien.
"""

from collections.abc import Sequence

import structlog

from app.core.errors import InvalidInput, TaskTooLarge
from app.model.schemas import ClusterSpec, NodeSpec
from app.power.service import energy
from app.sched.estimates import cpu_power_split
from app.sched.evaluate import node_static_w
from app.sched.schemas import ConsolidationResult, ConsolidationTask

logger = structlog.get_logger(__name__)


def _dynamic_wh(task: ConsolidationTask, node: NodeSpec) -> float:
    _, dynamic_w = cpu_power_split(node, task.cores, task.utilisation)
    return energy(dynamic_w, task.duration_s)


def first_fit_decreasing(tasks: Sequence[ConsolidationTask], nodes: Sequence[NodeSpec]) -> dict[int, str]:
    """
    Premier ajustement décroissant par nombre de cœurs

    Returns:
        dict: indice de tâche -> identifiant de nœud

    Raises:
        TaskTooLarge: Une tâche dépasse tous les nœuds
        InvalidInput: Les nœuds du cluster ne suffisent pas
    """
    largest = max((n.virtual_cores for n in nodes), default=0)
    free: dict[str, int] = {}
    packing: dict[int, str] = {}

    for idx in sorted(range(len(tasks)), key=lambda i: (-tasks[i].cores, i)):
        cores = tasks[idx].cores
        if cores > largest:
            raise TaskTooLarge(f"task {idx} needs {cores} cores, largest node has {largest}")

        target = next((n for n in free if free[n] >= cores), None)
        if target is None:
            target = next((n.id for n in nodes if n.id not in free and n.virtual_cores >= cores), None)
            if target is None:
                raise InvalidInput(f"cluster capacity exhausted while placing task {idx}")
            free[target] = next(n.virtual_cores for n in nodes if n.id == target)

        free[target] -= cores
        packing[idx] = target

    return dict(sorted(packing.items()))


def spread_node(task: ConsolidationTask, index: int, nodes: Sequence[NodeSpec]) -> NodeSpec:
    """Type de nœud d'une tâche en placement étalé : rotation à partir de index mod n"""
    for offset in range(len(nodes)):
        node = nodes[(index + offset) % len(nodes)]
        if node.virtual_cores >= task.cores:
            return node
    raise TaskTooLarge(f"task {index} needs {task.cores} cores, no node is large enough")


def consolidate(tasks: Sequence[ConsolidationTask], cluster: ClusterSpec) -> ConsolidationResult:
    """
    Compare un placement consolidé à un placement étalé (une tâche par nœud)

    Args:
        tasks: Tâches (cœurs, durée, utilisation)
        cluster: Nœuds disponibles, parcourus dans l'ordre des identifiants

    Returns:
        ConsolidationResult: Placement, nœuds allumés et énergies comparées
    """
    nodes = sorted(cluster.nodes, key=lambda n: n.id)
    by_id = {n.id: n for n in nodes}
    packing = first_fit_decreasing(tasks, nodes)

    consolidated = 0.0
    for node_id in sorted(set(packing.values())):
        placed = [tasks[i] for i, n in packing.items() if n == node_id]
        node = by_id[node_id]
        consolidated += energy(node_static_w(node), max(t.duration_s for t in placed))
        consolidated += sum(_dynamic_wh(t, node) for t in placed)

    spread = 0.0
    for idx, task in enumerate(tasks):
        node = spread_node(task, idx, nodes)
        spread += energy(node_static_w(node), task.duration_s) + _dynamic_wh(task, node)

    result = ConsolidationResult(
        packing=packing,
        nodes_powered=len(set(packing.values())),
        consolidated_energy_wh=consolidated,
        spread_energy_wh=spread,
        spread_nodes=len(tasks),
    )
    logger.debug(
        "consolidation",
        tasks=len(tasks),
        nodes_powered=result.nodes_powered,
        energy_delta_wh=result.energy_delta_wh,
    )
    return result
