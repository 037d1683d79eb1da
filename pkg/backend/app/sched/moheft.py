"""
MOHEFT : construction simultanée de k ordonnancements partiels

À chaque tâche (ordre des rangs), chaque solution est étendue par tous les
nœuds faisables ; on conserve les k extensions retenues par tri non dominé
puis distance de peuplement.
"""

import structlog

from app.core.errors import InvalidInput, NoFeasibleNode
from app.model.schemas import ClusterSpec, WorkflowDag
from app.sched.mapping import PartialSchedule, SlotPlanner
from app.sched.pareto import crowding_distance, non_dominated, non_dominated_sort
from app.sched.rank import rank_order
from app.sched.schemas import EstimateTable, ParetoFront

logger = structlog.get_logger(__name__)


def _objectives(p: PartialSchedule) -> tuple[float, float]:
    return p.objectives


def select(population: list[PartialSchedule], k: int) -> list[PartialSchedule]:
    """Retient k solutions : fronts complets puis les plus isolées du dernier front"""
    if len(population) <= k:
        return population

    kept: list[PartialSchedule] = []
    for front in non_dominated_sort(sorted(population, key=PartialSchedule.key), _objectives):
        if len(kept) + len(front) <= k:
            kept.extend(front)
            continue
        distance = crowding_distance(front, _objectives)
        ranked = sorted(range(len(front)), key=lambda i: (-distance[i], front[i].key()))
        kept.extend(front[i] for i in ranked[: k - len(kept)])
        break
    return kept


def final_front(population: list[PartialSchedule], algorithm: str) -> ParetoFront:
    """Ensemble non dominé, trié par (durée totale, énergie, placement)"""
    front = sorted(non_dominated(population, _objectives), key=PartialSchedule.key)
    return ParetoFront(solutions=tuple(p.to_schedule(algorithm) for p in front))


def moheft(
    dag: WorkflowDag,
    cluster: ClusterSpec,
    estimates: EstimateTable,
    k: int,
    comm_rate: float = 0.0,
) -> ParetoFront:
    """
    Front de Pareto (durée totale, énergie) construit par MOHEFT

    Args:
        k: Taille de la population conservée à chaque étape (>= 1)

    Raises:
        InvalidInput: k < 1
        NoFeasibleNode: Une tâche ne tient sur aucun nœud
    """
    if k < 1:
        raise InvalidInput(f"population size k must be >= 1, got {k}")

    planner = SlotPlanner(dag, cluster, estimates, comm_rate)
    population = [PartialSchedule()]

    for task_id in rank_order(dag, estimates, comm_rate):
        nodes = estimates.nodes_for(task_id)
        if not nodes:
            raise NoFeasibleNode(task_id)
        extended = [planner.place(p, task_id, n) for p in population for n in nodes]
        population = select(extended, k)

    logger.debug("moheft terminé", k=k, population=len(population))
    return final_front(population, "moheft")
