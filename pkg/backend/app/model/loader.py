"""
Lecture des fichiers de configuration (JSON)
"""

import json
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, ValidationError

from app.core.errors import InvalidInput
from app.model.dag import validate_dag
from app.model.schemas import ClusterSpec, NodeSpec, WorkflowDag

M = TypeVar("M", bound=BaseModel)


def describe_errors(error: ValidationError) -> str:
    """Erreurs de validation sur une ligne : `champ.sous_champ: message; ...`"""
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in error.errors()
    )


def load_model(path: str | Path, model: type[M]) -> M:
    """
    Lit un fichier JSON et le valide contre un schéma pydantic

    Raises:
        InvalidInput: Fichier illisible, JSON invalide ou champs refusés
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return model.model_validate(data)
    except UnicodeDecodeError as e:
        raise InvalidInput(f"{path}: not valid UTF-8 at byte {e.start}") from e
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"{path}: {e}") from e
    except ValidationError as e:
        raise InvalidInput(f"{path}: {describe_errors(e)}") from e


def load_cluster(path: str | Path) -> ClusterSpec:
    return load_model(path, ClusterSpec)


def load_node(path: str | Path) -> NodeSpec:
    return load_model(path, NodeSpec)


def load_workflow(path: str | Path) -> WorkflowDag:
    """Charge un workflow et vérifie qu'il s'agit d'un DAG"""
    workflow = load_model(path, WorkflowDag)
    validate_dag(workflow)
    return workflow
