"""
Constructeurs d'instances pour les tests
"""

from app.model.schemas import Channel, ClusterSpec, CostEntry, NodeSpec, TaskSpec, WorkflowDag
from app.power.schemas import PowerModel


def make_node(node_id: str, static_w: float = 10.0, peak_w: float = 50.0, cores: int = 1, **extra) -> NodeSpec:
    return NodeSpec(
        id=node_id,
        cpu=PowerModel(static_w=static_w, peak_w=peak_w),
        virtual_cores=cores,
        memory_gb=extra.pop("memory_gb", 4.0),
        lifetime_years=5.0,
        **extra,
    )


def make_task(task_id: str, costs: dict[str, float], utilisation: float = 1.0, **extra) -> TaskSpec:
    return TaskSpec(
        id=task_id,
        cost_table={n: CostEntry(runtime_s=r, mean_cpu_utilisation=utilisation) for n, r in costs.items()},
        **extra,
    )


def make_dag(tasks: list[TaskSpec], edges=(), data_size_mb: float = 0.0) -> WorkflowDag:
    return WorkflowDag(
        tasks=tuple(tasks),
        channels=tuple(Channel(producer=a, consumer=b, data_size_mb=data_size_mb) for a, b in edges),
    )


def make_cluster(*nodes: NodeSpec, **extra) -> ClusterSpec:
    return ClusterSpec(nodes=tuple(nodes), **extra)
