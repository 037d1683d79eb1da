"""
Outils de Pareto sur deux objectifs : durée totale et énergie
"""

from collections.abc import Callable, Sequence
from typing import TypeVar

T = TypeVar("T")
Objectives = tuple[float, float]


def dominates(a: Objectives, b: Objectives) -> bool:
    """a domine b : au moins aussi bon partout, strictement meilleur quelque part"""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def non_dominated(items: Sequence[T], objectives: Callable[[T], Objectives]) -> list[T]:
    """
    Éléments qu'aucun autre ne domine, dans l'ordre d'entrée

    Balayage par (durée, énergie) croissantes : un point est dominé dès
    qu'un point distinct déjà vu a une énergie inférieure ou égale. Les
    points identiques sont conservés ensemble.
    """
    points = [objectives(i) for i in items]
    order = sorted(range(len(items)), key=lambda i: points[i])
    kept = set()
    best_energy = float("inf")
    pos = 0
    while pos < len(order):
        point = points[order[pos]]
        group = []
        while pos < len(order) and points[order[pos]] == point:
            group.append(order[pos])
            pos += 1
        if best_energy > point[1]:
            kept.update(group)
        best_energy = min(best_energy, point[1])
    return [item for idx, item in enumerate(items) if idx in kept]


def non_dominated_sort(items: Sequence[T], objectives: Callable[[T], Objectives]) -> list[list[T]]:
    """Découpe en fronts successifs (le premier est non dominé)"""
    remaining = list(items)
    fronts = []
    while remaining:
        front = non_dominated(remaining, objectives)
        fronts.append(front)
        ids = {id(i) for i in front}
        remaining = [i for i in remaining if id(i) not in ids]
    return fronts


def crowding_distance(front: Sequence[T], objectives: Callable[[T], Objectives]) -> list[float]:
    """Distance de peuplement ; les extrémités reçoivent l'infini"""
    n = len(front)
    distance = [0.0] * n
    if n <= 2:
        return [float("inf")] * n

    points = [objectives(i) for i in front]
    for axis in range(2):
        order = sorted(range(n), key=lambda i: (points[i][axis], i))
        low, high = points[order[0]][axis], points[order[-1]][axis]
        distance[order[0]] = distance[order[-1]] = float("inf")
        if high == low:
            continue
        for pos in range(1, n - 1):
            gap = points[order[pos + 1]][axis] - points[order[pos - 1]][axis]
            distance[order[pos]] += gap / (high - low)
    return distance
