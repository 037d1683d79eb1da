"""
Comptabilité carbone : émissions opérationnelles et part du carbone intrinsèque
"""

from app.carbon.schemas import EmbodiedProfile
from app.core.errors import InvalidInput, InvalidPue

# Émissions totales d'un stockage sur bande LTO-8, par To et par an
TAPE_KG_PER_TB_YEAR = 0.114

# Carbone intrinsèque d'un SSD de référence (kg CO2e pour 3.84 To)
SSD_REFERENCE_KG = 422.37
SSD_REFERENCE_TB = 3.84


def operational_emissions(energy_kwh: float, pue: float, ci: float) -> float:
    """
    Émissions opérationnelles en gCO2e : énergie * PUE * intensité carbone

    Args:
        energy_kwh: Énergie consommée par les équipements (kWh)
        pue: Power usage effectiveness du centre de données
        ci: Intensité carbone du réseau (gCO2e/kWh)

    Raises:
        InvalidPue: Si pue < 1
    """
    if pue < 1.0:
        raise InvalidPue(pue)
    if energy_kwh < 0 or ci < 0:
        raise InvalidInput("energy and carbon intensity must be >= 0")
    return energy_kwh * pue * ci


def embodied_share(profile: EmbodiedProfile, usage_duration_s: float, node_count: int = 1) -> float:
    """
    Part du carbone intrinsèque attribuée à une utilisation, au prorata de la
    durée de vie

    Returns:
        float: kgCO2e
    """
    if usage_duration_s < 0:
        raise InvalidInput("usage duration must be >= 0")
    if node_count < 0:
        raise InvalidInput("node count must be >= 0")
    return profile.embodied_kgco2e * node_count * (usage_duration_s / profile.lifetime_s)


def ssd_embodied(
    capacity_tb: float,
    kg_per_reference: float = SSD_REFERENCE_KG,
    reference_tb: float = SSD_REFERENCE_TB,
) -> float:
    """Carbone intrinsèque (kg) d'une capacité SSD, linéaire en capacité"""
    return kg_per_reference / reference_tb * capacity_tb


def tape_storage_year(capacity_tb: float, kg_per_tb_year: float = TAPE_KG_PER_TB_YEAR) -> float:
    """Émissions annuelles (kg) d'un archivage sur bande"""
    return capacity_tb * kg_per_tb_year
