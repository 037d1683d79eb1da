"""
HEFT et GreenHEFT

Deux phases : classement par rang ascendant, puis placement de chaque tâche
sur le nœud qui minimise la date de fin (HEFT) ou l'énergie estimée
(GreenHEFT), dans le premier créneau respectant la capacité du nœud.
"""

from collections.abc import Callable
from typing import Literal

import structlog

from app.core.errors import NoFeasibleNode
from app.model.schemas import ClusterSpec, WorkflowDag
from app.sched.mapping import PartialSchedule, SlotPlanner
from app.sched.rank import rank_order
from app.sched.schemas import EstimateTable, Schedule

logger = structlog.get_logger(__name__)

Objective = Literal["finish", "energy"]

# observer(task_id, candidats {nœud: (fin, énergie)}, nœud retenu)
MappingObserver = Callable[[str, dict[str, tuple[float, float]], str], None]


def _list_schedule(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    estimates: EstimateTable,
    objective: Objective,
    comm_rate: float,
    observer: MappingObserver | None,
) -> PartialSchedule:
    planner = SlotPlanner(dag, cluster, estimates, comm_rate)
    partial = PartialSchedule()

    for task_id in rank_order(dag, estimates, comm_rate):
        nodes = estimates.nodes_for(task_id)
        if not nodes:
            raise NoFeasibleNode(task_id)

        candidates = {}
        for node_id in nodes:
            _, finish = planner.slot(partial, task_id, node_id)
            candidates[node_id] = (finish, estimates.get(task_id, node_id).energy_wh)

        if objective == "finish":
            chosen = min(nodes, key=lambda n: (candidates[n][0], n))
        else:
            chosen = min(nodes, key=lambda n: (candidates[n][1], candidates[n][0], n))

        if observer is not None:
            observer(task_id, candidates, chosen)
        partial = planner.place(partial, task_id, chosen)

    return partial


def heft(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    estimates: EstimateTable,
    comm_rate: float = 0.0,
    observer: MappingObserver | None = None,
) -> Schedule:
    """
    Ordonnancement HEFT : date de fin minimale, puis identifiant de nœud

    Args:
        dag: Workflow validé
        cluster: Cluster cible
        estimates: Table issue de task_node_estimates
        comm_rate: Débit de transfert entre nœuds (Mo/s, 0 = gratuit)
        observer: Rappel invoqué à chaque décision de placement

    Raises:
        NoFeasibleNode: Une tâche ne tient sur aucun nœud
    """
    partial = _list_schedule(dag, cluster, estimates, "finish", comm_rate, observer)
    logger.debug("heft terminé", tasks=len(partial.assignments), makespan_s=partial.makespan_s)
    return partial.to_schedule("heft")


def greenheft(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    estimates: EstimateTable,
    comm_rate: float = 0.0,
    observer: MappingObserver | None = None,
) -> Schedule:
    """
    Ordonnancement GreenHEFT : énergie estimée minimale, puis date de fin,
    puis identifiant de nœud

    L'énergie d'inactivité des nœuds n'entre pas dans le choix.
    """
    partial = _list_schedule(dag, cluster, estimates, "energy", comm_rate, observer)
    logger.debug("greenheft terminé", tasks=len(partial.assignments), energy_wh=partial.energy_wh)
    return partial.to_schedule("greenheft")
