"""
Service d'ordonnancement - point d'entrée commun à la CLI et à l'API
"""

import structlog

from app.model.dag import validate_dag
from app.power.service import load_coefficients
from app.sched.brute import brute_force_front
from app.sched.estimates import task_node_estimates
from app.sched.evaluate import evaluate_schedule, with_idle_accounting
from app.sched.heft import greenheft, heft
from app.sched.moheft import moheft
from app.sched.pareto import non_dominated
from app.sched.schemas import ParetoFront, Schedule, ScheduleRequest, ScheduleResult

logger = structlog.get_logger(__name__)


def _objectives(schedule: Schedule) -> tuple[float, float]:
    return schedule.makespan_s, schedule.energy_wh


def run_schedule(request: ScheduleRequest, coefficients: str | None = None) -> ScheduleResult:
    """
    Exécute l'algorithme demandé et vérifie chaque ordonnancement produit

    Avec idle_accounting, le front MOHEFT est refiltré sur l'énergie
    incluant l'inactivité ; le front exhaustif est recalculé sur ces
    mêmes objectifs.

    Args:
        request: Workflow, cluster, algorithme et options
        coefficients: Jeu de coefficients (nom ou chemin JSON)

    Returns:
        ScheduleResult: Ordonnancement unique ou front de Pareto
    """
    dag, cluster = request.dag, request.cluster
    validate_dag(dag)
    estimates = task_node_estimates(dag, cluster, load_coefficients(coefficients))

    def with_idle(schedule: Schedule) -> Schedule:
        if request.idle_accounting and not schedule.idle_accounting:
            return with_idle_accounting(schedule, dag, cluster, estimates, request.comm_rate)
        return schedule

    if request.algo in ("heft", "greenheft"):
        scheduler = heft if request.algo == "heft" else greenheft
        schedule = with_idle(scheduler(dag, cluster, estimates, request.comm_rate))
        evaluate_schedule(schedule, dag, cluster, estimates, request.comm_rate)
        return ScheduleResult(algorithm=request.algo, schedule=schedule)

    if request.algo == "moheft":
        front = moheft(dag, cluster, estimates, request.k, request.comm_rate)
    else:
        front = brute_force_front(dag, cluster, estimates, request.comm_rate, request.idle_accounting)

    solutions = non_dominated([with_idle(s) for s in front.solutions], _objectives)
    solutions.sort(key=lambda s: (s.makespan_s, s.energy_wh, s.mapping_key()))
    for schedule in solutions:
        evaluate_schedule(schedule, dag, cluster, estimates, request.comm_rate)
    logger.debug("front calculé", algorithm=request.algo, solutions=len(solutions))
    return ScheduleResult(algorithm=request.algo, front=ParetoFront(solutions=tuple(solutions)))
