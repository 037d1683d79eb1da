"""
Oracle exhaustif : toutes les affectations tâche -> nœud, ordonnancées
avec la même politique de créneaux que HEFT
"""

from dataclasses import replace
from itertools import product

import structlog

from app.core.config import settings
from app.core.errors import InstanceTooLarge, NoFeasibleNode
from app.model.schemas import ClusterSpec, WorkflowDag
from app.power.service import energy
from app.sched.evaluate import idle_energy_wh
from app.sched.mapping import PartialSchedule, SlotPlanner
from app.sched.moheft import final_front
from app.sched.rank import rank_order
from app.sched.schemas import EstimateTable, ParetoFront

logger = structlog.get_logger(__name__)


def _with_idle(partial: PartialSchedule, cluster: ClusterSpec, estimates: EstimateTable) -> PartialSchedule:
    static_share: dict[str, float] = {}
    for task_id in sorted(partial.assignments):
        node_id = partial.assignments[task_id].node_id
        estimate = estimates.get(task_id, node_id)
        static_share[node_id] = static_share.get(node_id, 0.0) + energy(estimate.static_w, estimate.runtime_s)
    nodes = {n.id: n for n in cluster.nodes}
    return replace(partial, energy_wh=partial.energy_wh + idle_energy_wh(static_share, partial.makespan_s, nodes))


def brute_force_front(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    estimates: EstimateTable,
    comm_rate: float = 0.0,
    idle_accounting: bool = False,
) -> ParetoFront:
    """
    Front de Pareto exact par énumération

    Args:
        idle_accounting: Le front est calculé sur l'énergie incluant
            l'inactivité des nœuds allumés

    Raises:
        InstanceTooLarge: Plus de BRUTE_FORCE_MAX_TASKS tâches ou de
            BRUTE_FORCE_MAX_NODES nœuds
    """
    if len(dag.tasks) > settings.BRUTE_FORCE_MAX_TASKS or len(cluster.nodes) > settings.BRUTE_FORCE_MAX_NODES:
        raise InstanceTooLarge(
            f"exhaustive search limited to {settings.BRUTE_FORCE_MAX_TASKS} tasks and "
            f"{settings.BRUTE_FORCE_MAX_NODES} nodes, got {len(dag.tasks)} tasks and {len(cluster.nodes)} nodes"
        )

    planner = SlotPlanner(dag, cluster, estimates, comm_rate)
    order = rank_order(dag, estimates, comm_rate)
    choices = []
    for task_id in order:
        nodes = estimates.nodes_for(task_id)
        if not nodes:
            raise NoFeasibleNode(task_id)
        choices.append(nodes)

    population = [
        planner.schedule_mapping(order, dict(zip(order, combo)))
        for combo in product(*choices)
    ]
    logger.debug("énumération exhaustive", mappings=len(population), idle_accounting=idle_accounting)
    if not idle_accounting:
        return final_front(population, "brute")

    front = final_front([_with_idle(p, cluster, estimates) for p in population], "brute")
    return ParetoFront(solutions=tuple(s.model_copy(update={"idle_accounting": True}) for s in front.solutions))
