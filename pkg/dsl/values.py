"""
Runtime values of the DSL.

Ints, Bools, Colors, Locs and the three categorical enums are plain Python
values; lists are tuples; pairs get their own type so they are never
mistaken for a list or a Loc.
"""

from dataclasses import dataclass
from typing import Any

from models.grid import Color, Connectivity, Direction, Loc, Orientation, Region
from dsl.types import Concrete, ListOf, PairOf, TypeExpr, UnionOf


@dataclass(frozen=True)
class Pair:
    first: Any
    second: Any


def is_list(value: Any) -> bool:
    return isinstance(value, tuple) and not isinstance(value, Loc)


def value_size(value: Any) -> int:
    """Rough cost of having built a value, charged against the step budget."""
    if isinstance(value, Region):
        return len(value)
    if is_list(value):
        return len(value)
    return 0


_CONCRETE_CHECKS = {
    "Int": lambda v: isinstance(v, int) and not isinstance(v, (bool, Color)),
    "Bool": lambda v: isinstance(v, bool),
    "Color": lambda v: isinstance(v, Color),
    "Loc": lambda v: isinstance(v, Loc),
    "Connectivity": lambda v: isinstance(v, Connectivity),
    "Direction": lambda v: isinstance(v, Direction),
    "Orientation": lambda v: isinstance(v, Orientation),
    "Region": lambda v: isinstance(v, Region),
}


def value_matches(value: Any, t: TypeExpr) -> bool:
    """Whether a runtime value inhabits a (resolved) type; variables match anything."""
    if isinstance(t, Concrete):
        return _CONCRETE_CHECKS[t.name](value)
    if isinstance(t, ListOf):
        return is_list(value) and all(value_matches(v, t.elem) for v in value)
    if isinstance(t, PairOf):
        return isinstance(value, Pair) and value_matches(value.first, t.first) \
            and value_matches(value.second, t.second)
    if isinstance(t, UnionOf):
        return any(value_matches(value, m) for m in t.members)
    return True
