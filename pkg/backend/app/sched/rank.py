"""
Phase de classement : rang ascendant (distance à la fin du workflow)
"""

from statistics import fmean

import networkx as nx

from app.model.dag import validate_dag
from app.model.schemas import WorkflowDag
from app.sched.schemas import EstimateTable


def transfer_time(data_size_mb: float, comm_rate: float) -> float:
    """Durée de transfert d'un canal ; nulle sans débit ou sans données"""
    if comm_rate <= 0 or data_size_mb <= 0:
        return 0.0
    return data_size_mb / comm_rate


def upward_rank(dag: WorkflowDag, estimates: EstimateTable, comm_rate: float = 0.0) -> dict[str, float]:
    """
    Rang ascendant de chaque tâche

    rank(t) = durée moyenne de t sur les nœuds faisables
              + max sur les successeurs s de (transfert(t, s) + rank(s))

    Args:
        dag: Workflow validé
        estimates: Estimations par (tâche, nœud)
        comm_rate: Débit de transfert uniforme en Mo/s (0 = transferts gratuits)
    """
    graph = validate_dag(dag)
    ranks: dict[str, float] = {}

    for task_id in reversed(list(nx.lexicographical_topological_sort(graph))):
        runtimes = [estimates.get(task_id, n).runtime_s for n in estimates.nodes_for(task_id)]
        mean_runtime = fmean(runtimes) if runtimes else 0.0
        downstream = [
            transfer_time(graph.edges[task_id, succ]["data_size_mb"], comm_rate) + ranks[succ]
            for succ in graph.successors(task_id)
        ]
        ranks[task_id] = mean_runtime + max(downstream, default=0.0)

    return ranks


def rank_order(dag: WorkflowDag, estimates: EstimateTable, comm_rate: float = 0.0) -> list[str]:
    """
    Ordre de traitement : rang décroissant

    Les égalités suivent l'ordre topologique lexicographique, ce qui garantit
    qu'un producteur passe toujours avant ses consommateurs.
    """
    ranks = upward_rank(dag, estimates, comm_rate)
    topo = list(nx.lexicographical_topological_sort(validate_dag(dag)))
    position = {t: i for i, t in enumerate(topo)}
    return sorted(ranks, key=lambda t: (-ranks[t], position[t]))
