"""
Backend FastAPI - Workflow Footprint
Point d'entrée principal de l'application
"""

from fastapi import FastAPI, Request, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
import structlog

from app.core.config import settings
from app.core.errors import FootprintError
from app.core.logging import configure_logging
from app.carbon.router import router as carbon_router
from app.estimate.router import router as estimate_router
from app.sched.router import router as sched_router

configure_logging()
logger = structlog.get_logger(__name__)

# Créer l'application FastAPI
app = FastAPI(
    title=settings.APP_NAME,
    version=settings.APP_VERSION,
    description="API d'estimation de l'empreinte carbone et d'ordonnancement énergétique de workflows"
)

# Configuration CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.BACKEND_CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Enregistrer les routers
app.include_router(estimate_router)
app.include_router(sched_router)
app.include_router(carbon_router)


@app.exception_handler(FootprintError)
async def footprint_error_handler(request: Request, exc: FootprintError):
    """Erreurs métier -> 422 avec le code stable de l'erreur"""
    logger.info("erreur métier", path=request.url.path, code=exc.code)
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"code": exc.code, "detail": str(exc)},
    )


@app.get("/")
async def root():
    """Endpoint racine - Health check"""
    return {
        "message": f"{settings.APP_NAME} API",
        "version": settings.APP_VERSION,
        "status": "running",
        "environment": settings.ENVIRONMENT
    }


@app.get("/api/health")
async def health():
    """Endpoint de santé avec informations détaillées"""
    return {
        "status": "healthy",
        "environment": settings.ENVIRONMENT,
        "coefficient_set": settings.COEFFICIENT_SET,
        "version": settings.APP_VERSION
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=8000,
        reload=settings.DEBUG
    )
