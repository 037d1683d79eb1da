"""
Erreurs métier

Chaque erreur porte un code stable (le nom de la classe) que la CLI affiche
sous la forme `error[<code>]: <message>` et que le service HTTP renvoie dans
le corps de la réponse.
"""

from collections.abc import Sequence


class FootprintError(Exception):
    """Racine de toutes les erreurs du domaine"""

    code = "FootprintError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.code = cls.__name__

    def render(self) -> str:
        """Ligne unique, facile à filtrer avec grep"""
        return f"error[{self.code}]: {self.message}"


class InvalidInput(FootprintError):
    pass


class IncompatibleUnits(FootprintError):
    pass


# --- Workflows ---

class CycleDetected(FootprintError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__(f"cycle in workflow: {' -> '.join(self.cycle)}")


class UnknownTask(FootprintError):
    def __init__(self, task_id: str):
        self.task_id = task_id
        super().__init__(f"unknown task '{task_id}'")


class NotDownwardClosed(FootprintError):
    def __init__(self, task_id: str, predecessor: str):
        self.task_id = task_id
        self.predecessor = predecessor
        super().__init__(
            f"task '{task_id}' is completed but its predecessor '{predecessor}' is not"
        )


# --- Puissance ---

class UtilisationOutOfRange(FootprintError):
    def __init__(self, utilisation: float):
        self.utilisation = utilisation
        super().__init__(f"utilisation {utilisation} outside [0, 1]")


class AllocationExceedsNode(FootprintError):
    def __init__(self, allocated: int, node_cores: int):
        self.allocated = allocated
        self.node_cores = node_cores
        super().__init__(f"{allocated} cores allocated on a node with {node_cores} cores")


class UnknownCoefficientSet(FootprintError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown coefficient set '{name}'")


# --- Carbone ---

class InvalidPue(FootprintError):
    def __init__(self, pue: float):
        self.pue = pue
        super().__init__(f"PUE must be >= 1.0, got {pue}")


class UnknownRegion(FootprintError):
    def __init__(self, region: str, year: int | None = None):
        self.region = region
        self.year = year
        where = f"'{region}'" if year is None else f"'{region}' for {year}"
        super().__init__(f"no carbon intensity for region {where}")


class TimestampOutOfRange(FootprintError):
    pass


class SeriesCoverageInsufficient(FootprintError):
    pass


# --- Traces ---

class MalformedRow(FootprintError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnknownFormat(FootprintError):
    def __init__(self, fmt: str):
        self.format = fmt
        super().__init__(f"unknown trace format '{fmt}'")


# --- Estimation ---

class UnknownNode(FootprintError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node '{node_id}'")


# --- Ordonnancement ---

class MissingCostEntry(FootprintError):
    def __init__(self, task_id: str, node_id: str):
        self.task_id = task_id
        self.node_id = node_id
        super().__init__(f"no cost entry for task '{task_id}' on node '{node_id}'")


class NoFeasibleNode(FootprintError):
    def __init__(self, task_id: str):
        self.task_id = task_id
        super().__init__(f"task '{task_id}' fits on no node of the cluster")


class InvalidSchedule(FootprintError):
    pass


class InstanceTooLarge(FootprintError):
    pass


class TaskTooLarge(FootprintError):
    pass


class InvalidRatio(FootprintError):
    pass
