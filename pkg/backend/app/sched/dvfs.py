"""
Analyse « what-if » DVFS

Modèle paramétrique : à un ratio de fréquence f, la part liée au CPU de la
durée s'allonge en 1/f, la puissance dynamique est multipliée par f^alpha
et la puissance statique est inchangée.
"""

from collections.abc import Iterable

from app.core.config import settings
from app.core.errors import InvalidInput, InvalidRatio
from app.power.schemas import PowerModel
from app.power.service import dynamic_power, energy
from app.sched.schemas import DvfsResult, DvfsSweep, TaskNodeEstimate


def _check(ratio: float, beta: float, alpha: float) -> None:
    if not 0.0 < ratio <= 1.0:
        raise InvalidRatio(f"frequency ratio must lie in (0, 1], got {ratio}")
    if not 0.0 <= beta <= 1.0:
        raise InvalidInput(f"cpu-bound fraction must lie in [0, 1], got {beta}")
    if alpha < 1.0:
        raise InvalidInput(f"DVFS exponent must be >= 1, got {alpha}")


def scaled_runtime(runtime_s: float, beta: float, ratio: float) -> float:
    """runtime * ((1 - beta) + beta / f)"""
    return runtime_s * ((1.0 - beta) + beta / ratio)


def dvfs_whatif(
    runtime_s: float,
    utilisation: float,
    beta: float,
    model: PowerModel,
    ratio: float,
    alpha: float | None = None,
) -> DvfsResult:
    """
    Durée, puissance et énergie d'une tâche à un ratio de fréquence donné

    Args:
        runtime_s: Durée à fréquence nominale
        utilisation: Utilisation CPU moyenne
        beta: Fraction de la durée liée au CPU (0 = purement E/S)
        model: Modèle de puissance du processeur
        ratio: Ratio de fréquence f dans (0, 1]
        alpha: Exposant de la puissance dynamique (settings.DVFS_ALPHA par défaut)

    Raises:
        InvalidRatio: f hors de (0, 1]
    """
    alpha = settings.DVFS_ALPHA if alpha is None else alpha
    _check(ratio, beta, alpha)

    runtime = scaled_runtime(runtime_s, beta, ratio)
    watts = model.static_w + dynamic_power(model, utilisation) * ratio ** alpha
    return DvfsResult(
        frequency_ratio=ratio,
        runtime_s=runtime,
        watts=watts,
        energy_wh=energy(watts, runtime),
    )


def dvfs_sweep(
    runtime_s: float,
    utilisation: float,
    beta: float,
    model: PowerModel,
    ratios: Iterable[float],
    alpha: float | None = None,
) -> DvfsSweep:
    """
    Évalue plusieurs ratios et retient celui qui minimise l'énergie

    En cas d'égalité, le ratio le plus élevé (le plus rapide) est retenu.
    """
    results = tuple(
        dvfs_whatif(runtime_s, utilisation, beta, model, r, alpha)
        for r in sorted(set(ratios), reverse=True)
    )
    best = min(results, key=lambda r: (r.energy_wh, -r.frequency_ratio), default=None)
    return DvfsSweep(results=results, best_ratio=best.frequency_ratio if best else None)


def scale_estimate(
    estimate: TaskNodeEstimate,
    beta: float,
    ratio: float,
    alpha: float | None = None,
) -> tuple[float, float]:
    """
    Applique le modèle DVFS à une estimation (tâche, nœud)

    Returns:
        tuple: (durée_s, énergie_wh) au ratio demandé
    """
    alpha = settings.DVFS_ALPHA if alpha is None else alpha
    _check(ratio, beta, alpha)
    if ratio == 1.0:
        return estimate.runtime_s, estimate.energy_wh

    runtime = scaled_runtime(estimate.runtime_s, beta, ratio)
    watts = estimate.static_w + estimate.dynamic_w * ratio ** alpha + estimate.memory_w
    return runtime, energy(watts, runtime)
