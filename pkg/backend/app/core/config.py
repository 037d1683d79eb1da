"""
Configuration centralisée de l'application
Utilise pydantic-settings pour la validation des variables d'environnement
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Configuration de l'application
    Les valeurs sont chargées depuis les variables d'environnement ou .env
    """

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # Application
    APP_NAME: str = "Workflow Footprint"
    APP_VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Estimation
    COEFFICIENT_SET: str = "ccf-2023"  # Jeu de coefficients par défaut
    DEFAULT_UTILISATION: float = 0.5   # Repli quand l'utilisation CPU est inconnue

    # Ordonnancement
    DVFS_ALPHA: float = 3.0
    BRUTE_FORCE_MAX_TASKS: int = 8
    BRUTE_FORCE_MAX_NODES: int = 3

    # CORS (service HTTP)
    BACKEND_CORS_ORIGINS: list[str] = [
        "http://localhost:5173",
        "http://localhost:3000",
    ]


# Instance globale des settings
settings = Settings()
