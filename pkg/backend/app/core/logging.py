"""
Journalisation structurée (structlog)

Les journaux partent sur stderr : la sortie standard est réservée aux
rapports, qui doivent rester identiques octet pour octet d'une exécution à
l'autre.
"""

import logging
import sys

import structlog

from app.core.config import settings


class _Stderr:
    """sys.stderr résolu à chaque écriture (il peut être remplacé après configuration)"""

    def write(self, message: str) -> int:
        return sys.stderr.write(message)

    def flush(self) -> None:
        sys.stderr.flush()


def configure_logging(level: str | None = None) -> None:
    """
    Configure structlog une fois pour tout le processus

    Args:
        level: Niveau de journalisation (par défaut settings.LOG_LEVEL)
    """
    numeric = logging.getLevelName((level or settings.LOG_LEVEL).upper())
    if not isinstance(numeric, int):
        numeric = logging.WARNING

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=structlog.PrintLoggerFactory(file=_Stderr()),
        cache_logger_on_first_use=False,
    )
