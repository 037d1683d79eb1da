"""
Routes d'estimation - Endpoints API
"""

from fastapi import APIRouter

from app.estimate import schemas, service

router = APIRouter(
    prefix="/api/estimate",
    tags=["Estimation"]
)


@router.post("/bulk", response_model=schemas.FootprintReport)
async def estimate_bulk(request: schemas.BulkRequest):
    """
    Estimation d'un run global

    - **node**: Spécification des nœuds (tous identiques)
    - **run**: Nombre de nœuds, durée et utilisation CPU moyenne
    - **repetitions**: Nombre d'exécutions identiques
    - **pue**, **region**, **year**, **ci**: Contexte énergétique

    Retourne le rapport d'empreinte (énergie par composant, émissions,
    part du carbone intrinsèque).
    """
    ctx = service.build_context(pue=request.pue, ci=request.ci, region=request.region, year=request.year)
    return service.estimate_bulk(request.run, request.node, ctx, request.repetitions)


@router.post("/core-hours", response_model=schemas.FootprintReport)
async def estimate_core_hours(request: schemas.CoreHoursRequest):
    """
    Estimation à partir d'heures-cœur et d'un modèle par cœur

    Le rapport est une borne inférieure (CPU uniquement).
    """
    ctx = service.build_context(pue=request.pue, ci=request.ci, region=request.region, year=request.year)
    return service.estimate_core_hours(request.run, ctx)


@router.post("/storage", response_model=schemas.StorageYearEstimate)
async def estimate_storage(request: schemas.StorageRequest):
    """
    Énergie et émissions annuelles d'un stockage SSD

    Inclut la comparaison avec un archivage sur bande et le carbone
    intrinsèque des SSD.
    """
    ctx = service.build_context(pue=request.pue, ci=request.ci, region=request.region, year=request.year)
    return service.storage_year_estimate(request.capacity_tb, ctx.coeffs, ctx.pue, ctx.ci)
