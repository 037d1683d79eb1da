"""
Calculs de puissance et d'énergie

Toutes les fonctions sont pures : watts en entrée comme en sortie, énergie en
Wh. Les conversions d'unités aux frontières de l'API passent par
app.model.units.
"""

import json
from pathlib import Path
from typing import TYPE_CHECKING

import structlog
from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import (
    AllocationExceedsNode,
    InvalidInput,
    UnknownCoefficientSet,
    UtilisationOutOfRange,
)
from app.power.schemas import (
    COEFFICIENT_SETS,
    ComponentCoefficients,
    PerCorePowerModel,
    PowerModel,
)

if TYPE_CHECKING:
    from app.model.schemas import NodeSpec

logger = structlog.get_logger(__name__)

SECONDS_PER_HOUR = 3600.0


def _check_utilisation(utilisation: float) -> None:
    if not 0.0 <= utilisation <= 1.0:
        raise UtilisationOutOfRange(utilisation)


def clamp_utilisation(utilisation: float, source: str = "") -> float:
    """
    Ramène une utilisation mesurée dans [0, 1]

    Les traces multi-threadées peuvent dépasser 100 % ; le modèle linéaire
    n'est défini que sur [0, 1], la valeur est donc plafonnée à 1.

    Raises:
        UtilisationOutOfRange: Si l'utilisation est négative
    """
    if utilisation < 0:
        raise UtilisationOutOfRange(utilisation)
    if utilisation > 1.0:
        logger.warning("utilisation plafonnée à 1", utilisation=utilisation, source=source)
        return 1.0
    return utilisation


def dynamic_power(model: PowerModel, utilisation: float) -> float:
    """Part dynamique : (peak - static) * u"""
    _check_utilisation(utilisation)
    return model.dynamic_range_w * utilisation


def total_power(model: PowerModel, utilisation: float) -> float:
    """Puissance totale : static + part dynamique"""
    return model.static_w + dynamic_power(model, utilisation)


def per_core_power(model: PerCorePowerModel, cores: int, utilisation: float) -> float:
    """
    Puissance d'un modèle par cœur

    Args:
        model: Plage min/max par cœur
        cores: Nombre de cœurs alloués
        utilisation: Utilisation moyenne des cœurs alloués

    Returns:
        float: cores * (min + (max - min) * u), en W
    """
    _check_utilisation(utilisation)
    per_core = model.min_w_per_core + (model.max_w_per_core - model.min_w_per_core) * utilisation
    return cores * per_core


def attributed_cpu_power(
    model: PowerModel,
    node_cores: int,
    allocated_cores: int,
    utilisation_of_allocated: float,
) -> float:
    """
    Puissance CPU attribuée à une tâche sur un nœud partagé

    La statique comme la plage dynamique sont réparties au prorata des cœurs
    alloués.

    Args:
        model: Modèle de puissance du processeur
        node_cores: Cœurs virtuels du nœud
        allocated_cores: Cœurs alloués à la tâche
        utilisation_of_allocated: Utilisation des cœurs alloués, dans [0, 1]

    Returns:
        float: Puissance attribuée (W)

    Raises:
        AllocationExceedsNode: Si l'allocation sort de [1, node_cores]
        UtilisationOutOfRange: Si l'utilisation sort de [0, 1]
    """
    if not 1 <= allocated_cores <= node_cores:
        raise AllocationExceedsNode(allocated_cores, node_cores)
    _check_utilisation(utilisation_of_allocated)

    share = allocated_cores / node_cores
    static_share = model.static_w * share
    dynamic_share = model.dynamic_range_w * share * utilisation_of_allocated
    return static_share + dynamic_share


def component_power(node: "NodeSpec", coeffs: ComponentCoefficients) -> tuple[float, float]:
    """
    Puissance mémoire et stockage d'un nœud, indépendante de la charge

    Returns:
        tuple: (memory_w, storage_w)
    """
    memory_w = node.memory_gb * coeffs.memory_w_per_gb

    storage_w = 0.0
    for disk in node.disks:
        if disk.kind == "HDD":
            per_disk = disk.power_w if disk.power_w is not None else coeffs.hdd_w_per_disk
            storage_w += disk.count * per_disk
        else:
            per_tb = disk.power_w_per_tb if disk.power_w_per_tb is not None else coeffs.ssd_w_per_tb
            storage_w += disk.count * disk.capacity_tb * per_tb

    return memory_w, storage_w


def energy(power_w: float, duration_s: float) -> float:
    """Énergie en Wh pour une puissance constante pendant duration_s secondes"""
    return power_w * duration_s / SECONDS_PER_HOUR


def load_coefficients(name_or_path: str | None = None) -> ComponentCoefficients:
    """
    Charge un jeu de coefficients par nom ou depuis un fichier JSON

    Args:
        name_or_path: Nom d'un jeu embarqué, chemin d'un fichier JSON, ou
            None pour le jeu par défaut (settings.COEFFICIENT_SET)

    Raises:
        UnknownCoefficientSet: Nom inconnu
        InvalidInput: Fichier illisible ou champs invalides
    """
    name = name_or_path or settings.COEFFICIENT_SET
    if name in COEFFICIENT_SETS:
        return COEFFICIENT_SETS[name]

    path = Path(name)
    if not path.is_file():
        raise UnknownCoefficientSet(name)
    try:
        return ComponentCoefficients.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (ValidationError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InvalidInput(f"{path}: {e}") from e
