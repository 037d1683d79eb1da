"""
Routes d'ordonnancement - Endpoints API
"""

from fastapi import APIRouter

from app.sched import schemas, service

router = APIRouter(
    prefix="/api",
    tags=["Scheduling"]
)


@router.post("/schedule", response_model=schemas.ScheduleResult)
async def schedule(request: schemas.ScheduleRequest):
    """
    Ordonnance un workflow sur un cluster hétérogène

    - **algo**: heft, greenheft, moheft ou brute
    - **k**: Taille de population pour moheft
    - **dag**: Tâches, tables de coûts et canaux
    - **cluster**: Nœuds disponibles
    - **comm_rate**: Débit de transfert entre nœuds (Mo/s)
    - **idle_accounting**: Inclure l'énergie d'inactivité des nœuds allumés

    Retourne un ordonnancement (heft, greenheft) ou un front de Pareto.
    """
    return service.run_schedule(request)
