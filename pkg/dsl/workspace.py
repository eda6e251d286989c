"""
Workspace templates and per-demonstration workspaces.

A template lists the symbol keys a task may use; a workspace binds each key
to a value for one input raster.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Tuple

from models.grid import Color, Connectivity, Direction, Orientation, Raster, raster_to_region
from models.task import Task
from dsl.program import FUNCTIONAL_INPUT
from dsl.types import COLOR, CONNECTIVITY, DIRECTION, INT, ORIENTATION, REGION, TypeExpr

CONSTANT = "constant"
TASK_CONDITIONAL = "task-conditional"
PER_DEMONSTRATION = "per-demonstration"
FUNCTIONAL = "functional"

SCENE = "Scene"


@dataclass(frozen=True)
class SymbolKey:
    name: str
    type: TypeExpr
    scope: str


CONSTANT_VALUES: Dict[str, Tuple[TypeExpr, Any]] = {
    "Zero": (INT, 0),
    "One": (INT, 1),
    "Horizontal": (ORIENTATION, Orientation.HORIZONTAL),
    "Vertical": (ORIENTATION, Orientation.VERTICAL),
    "N4": (CONNECTIVITY, Connectivity.N4),
    "N8": (CONNECTIVITY, Connectivity.N8),
    "Cw": (DIRECTION, Direction.CW),
    "Ccw": (DIRECTION, Direction.CCW),
}

COLOR_KEYS: Dict[str, Color] = {c.symbol: c for c in Color}

CONSTANT_KEYS = tuple(SymbolKey(name, t, CONSTANT) for name, (t, _) in CONSTANT_VALUES.items())
SCENE_KEY = SymbolKey(SCENE, REGION, PER_DEMONSTRATION)

# every key a stored program may mention, FunctionalInput excluded
ALL_KEY_NAMES = frozenset(CONSTANT_VALUES) | frozenset(COLOR_KEYS) | {SCENE}
RESERVED_NAMES = ALL_KEY_NAMES | {FUNCTIONAL_INPUT}


@dataclass(frozen=True)
class WorkspaceTemplate:
    """Ordered key set valid across every demonstration of a task."""
    keys: Tuple[SymbolKey, ...]

    @property
    def names(self) -> List[str]:
        return [k.name for k in self.keys]

    def symbols(self) -> List[Tuple[str, TypeExpr]]:
        return [(k.name, k.type) for k in self.keys]

    def __contains__(self, name: str) -> bool:
        return any(k.name == name for k in self.keys)

    def type_of(self, name: str) -> TypeExpr:
        for k in self.keys:
            if k.name == name:
                return k.type
        raise KeyError(name)


@dataclass(frozen=True)
class Workspace:
    template: WorkspaceTemplate
    bindings: Mapping[str, Any]

    def lookup(self, name: str) -> Any:
        return self.bindings[name]

    def __contains__(self, name: str) -> bool:
        return name in self.bindings


def template_for_colors(colors) -> WorkspaceTemplate:
    """Constants, the given colors in code order, then Scene."""
    color_keys = tuple(
        SymbolKey(c.symbol, COLOR, TASK_CONDITIONAL) for c in sorted(Color(int(x)) for x in set(colors))
    )
    return WorkspaceTemplate(keys=CONSTANT_KEYS + color_keys + (SCENE_KEY,))


def build_template(task: Task) -> WorkspaceTemplate:
    """
    Template for a task: the 8 constants, every color occurring in any of the
    task's rasters (inputs, outputs and test pairs), and Scene.
    """
    colors = set()
    for raster in task.rasters():
        colors |= raster.colors()
    return template_for_colors(colors)


def full_template() -> WorkspaceTemplate:
    """Template with all ten colors; used to parse programs outside any task."""
    return template_for_colors(Color)


def instantiate(template: WorkspaceTemplate, input_raster: Raster) -> Workspace:
    """Bind every template key for one input raster."""
    bindings: Dict[str, Any] = {}
    for key in template.keys:
        if key.scope == CONSTANT:
            bindings[key.name] = CONSTANT_VALUES[key.name][1]
        elif key.scope == TASK_CONDITIONAL:
            bindings[key.name] = COLOR_KEYS[key.name]
        elif key.name == SCENE:
            bindings[key.name] = raster_to_region(input_raster)
    return Workspace(template=template, bindings=bindings)
