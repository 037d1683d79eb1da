"""
Validation et parcours des workflows (graphes orientés acycliques)
"""

from collections.abc import Iterable

import networkx as nx

from app.core.errors import CycleDetected, NotDownwardClosed, UnknownTask
from app.model.schemas import WorkflowDag


def to_graph(workflow: WorkflowDag) -> nx.DiGraph:
    """
    Construit le graphe networkx du workflow

    Les nœuds sont insérés dans l'ordre lexicographique pour que tous les
    parcours soient déterministes.

    Raises:
        UnknownTask: Si un canal référence une tâche inexistante
    """
    graph = nx.DiGraph()
    known = set(workflow.task_ids)
    graph.add_nodes_from(workflow.task_ids)

    for channel in sorted(workflow.channels, key=lambda c: (c.producer, c.consumer)):
        for endpoint in (channel.producer, channel.consumer):
            if endpoint not in known:
                raise UnknownTask(endpoint)
        graph.add_edge(channel.producer, channel.consumer, data_size_mb=channel.data_size_mb)

    return graph


def validate_dag(workflow: WorkflowDag) -> nx.DiGraph:
    """
    Vérifie que le workflow est un DAG dont toutes les références existent

    Args:
        workflow: Workflow à valider

    Returns:
        nx.DiGraph: Le graphe validé

    Raises:
        UnknownTask: Référence pendante dans un canal
        CycleDetected: Le graphe contient un cycle (tâches du cycle, en
            commençant par la plus petite dans l'ordre lexicographique)
    """
    graph = to_graph(workflow)
    try:
        edges = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return graph

    cycle = [u for u, _ in edges]
    start = cycle.index(min(cycle))
    raise CycleDetected(cycle[start:] + cycle[:start])


def topological_order(workflow: WorkflowDag) -> list[str]:
    """Ordre topologique, égalités départagées par identifiant"""
    graph = validate_dag(workflow)
    return list(nx.lexicographical_topological_sort(graph))


def ready_tasks(workflow: WorkflowDag, completed: Iterable[str]) -> frozenset[str]:
    """
    Tâches prêtes : non terminées et dont tous les prédécesseurs sont terminés

    Args:
        workflow: Workflow
        completed: Tâches déjà terminées (fermées vers le bas)

    Raises:
        UnknownTask: Tâche terminée inconnue
        NotDownwardClosed: Une tâche terminée a un prédécesseur non terminé
    """
    graph = to_graph(workflow)
    done = set(completed)

    for task_id in sorted(done):
        if task_id not in graph:
            raise UnknownTask(task_id)
        for pred in sorted(graph.predecessors(task_id)):
            if pred not in done:
                raise NotDownwardClosed(task_id, pred)

    return frozenset(
        t for t in graph.nodes
        if t not in done and all(p in done for p in graph.predecessors(t))
    )
