"""
Exception hierarchy shared by every arcloop module.
"""

from enum import Enum
from typing import Optional


class ArcLoopError(Exception):
    """Base class for all errors raised deliberately by arcloop."""


class ConfigError(ArcLoopError):
    """Invalid configuration key or value."""


class MalformedTask(ArcLoopError):
    """An ARC task file that violates the grid format."""

    def __init__(self, message: str, filename: Optional[str] = None):
        self.filename = filename
        prefix = f"{filename}: " if filename else ""
        super().__init__(f"{prefix}{message}")


class StoreError(ArcLoopError):
    """Persistence failure in the task store."""


class GridError(ArcLoopError):
    """Rasterization or geometry failure on a region."""


class EmptyRegion(GridError):
    pass


class OutOfCanvas(GridError):
    pass


class UnificationFailure(ArcLoopError):
    """Two type expressions cannot be made equal."""


class NoCandidates(ArcLoopError):
    """No operation or symbol fits a typed hole."""


class GenerationDeadEnd(ArcLoopError):
    """Program generation exhausted its backtracking budget."""


class ExplorationStalled(ArcLoopError):
    """Exploration hit its iteration cap before reaching its targets."""


class ProgramParseError(ArcLoopError):
    """Malformed canonical program text."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class ProgramTypeError(ArcLoopError):
    """A parsed program does not type-check."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        where = f" at node {path}" if path else ""
        super().__init__(f"{message}{where}")


class RuntimeErrorKind(str, Enum):
    EMPTY_LIST_ACCESS = "EmptyListAccess"
    EMPTY_REGION = "EmptyRegion"
    OUT_OF_CANVAS = "OutOfCanvas"
    DIVERGENT_VALUE = "DivergentValue"
    ARITY_MISMATCH = "ArityMismatch"
    UNBOUND_SYMBOL = "UnboundSymbol"


class DslRuntimeError(ArcLoopError):
    """The single error an evaluation may end with."""

    def __init__(self, kind: RuntimeErrorKind, message: str, node_index: Optional[int] = None):
        self.kind = kind
        self.message = message
        self.node_index = node_index
        where = f" (node {node_index})" if node_index is not None else ""
        super().__init__(f"{kind.value}: {message}{where}")
