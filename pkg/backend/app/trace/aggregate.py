"""
Agrégation des traces par nom de tâche
"""

from collections import defaultdict

from app.trace.schemas import RunTrace, TaskNameAggregate, TraceRecord


def aggregate_by_task_name(trace: RunTrace) -> dict[str, TaskNameAggregate]:
    """
    Regroupe les exécutions par nom de tâche

    L'utilisation moyenne est pondérée par les cœur-secondes ; sans
    cœur-seconde (durées nulles), c'est la moyenne simple.

    Returns:
        dict: nom de tâche -> agrégat, trié par nom
    """
    groups: dict[str, list[TraceRecord]] = defaultdict(list)
    for record in trace.records:
        groups[record.task_name].append(record)

    result = {}
    for name in sorted(groups):
        records = groups[name]
        core_seconds = sum(r.core_seconds for r in records)
        if core_seconds > 0:
            mean_u = sum(r.cpu_utilisation * r.core_seconds for r in records) / core_seconds
        else:
            mean_u = sum(r.cpu_utilisation for r in records) / len(records)
        result[name] = TaskNameAggregate(
            count=len(records),
            total_cpu_core_seconds=core_seconds,
            mean_utilisation=mean_u,
            max_memory_gb=max(r.peak_memory_gb for r in records),
        )
    return result
