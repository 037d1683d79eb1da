"""
Routes d'intensité carbone - Endpoints API
"""

from fastapi import APIRouter

from app.carbon.intensity import BUNDLED_TABLE, rank_regions
from app.carbon.schemas import CarbonIntensity, RegionEmissions, RegionRankingRequest, ShiftRequest
from app.carbon.shifting import ShiftResult, best_start_time, scale_profile
from app.core.errors import UnknownRegion

router = APIRouter(
    prefix="/api/carbon",
    tags=["Carbon"]
)


@router.get("/intensity/{region}/{year}", response_model=CarbonIntensity)
async def get_intensity(region: str, year: int):
    """
    Intensité carbone annuelle moyenne d'une région (table embarquée)
    """
    entry = BUNDLED_TABLE.get((region, year))
    if entry is None:
        raise UnknownRegion(region, year)
    return entry


@router.post("/shift", response_model=ShiftResult)
async def shift(request: ShiftRequest):
    """
    Cherche l'heure de démarrage la moins émettrice dans une fenêtre

    - **profile**: Profil de puissance (durée_s, watts)
    - **series**: Série d'intensité carbone constante par morceaux
    - **window_start**, **window_end**: Bornes incluses des démarrages possibles
    - **step_s**: Pas de la grille de candidats
    - **pue**: Appliqué au profil avant la recherche
    """
    return best_start_time(
        scale_profile(request.profile, request.pue),
        request.series,
        (request.window_start, request.window_end),
        request.step_s,
    )


@router.post("/regions", response_model=list[RegionEmissions])
async def regions(request: RegionRankingRequest):
    """
    Classe des régions candidates de la moins à la plus émettrice

    - **regions**: Identifiants de région (table embarquée)
    - **year**: Année de la moyenne annuelle
    - **energy_kwh**, **pue**: Run dont on compare les émissions
    """
    return rank_regions(request.regions, request.year, request.energy_kwh, request.pue)
