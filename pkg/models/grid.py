"""
Rasters, regions, colors and locations.

A Raster is the dense ARC grid; a Region is the sparse (position, color) set
the DSL computes with. Both are immutable.
"""

import hashlib
import json
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np

from models.errors import EmptyRegion, GridError, OutOfCanvas

MAX_SIDE = 30


class Color(IntEnum):
    BLACK = 0
    BLUE = 1
    RED = 2
    GREEN = 3
    YELLOW = 4
    GREY = 5
    FUCHSIA = 6
    ORANGE = 7
    TEAL = 8
    BROWN = 9

    @property
    def symbol(self) -> str:
        """Workspace key name, e.g. ``Fuchsia``."""
        return self.name.capitalize()


class Connectivity(Enum):
    N4 = "n4"
    N8 = "n8"


class Direction(Enum):
    CW = "cw"
    CCW = "ccw"


class Orientation(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class Loc(NamedTuple):
    """Grid position; origin top-left, rows grow downward."""
    row: int
    col: int

    def __add__(self, other: "Loc") -> "Loc":  # type: ignore[override]
        return Loc(self.row + other.row, self.col + other.col)

    def __sub__(self, other: "Loc") -> "Loc":
        return Loc(self.row - other.row, self.col - other.col)

    def __neg__(self) -> "Loc":
        return Loc(-self.row, -self.col)


@dataclass(frozen=True)
class Raster:
    """Dense row-major grid of colors, 1..30 cells per side."""
    height: int
    width: int
    cells: Tuple[Color, ...]

    def __post_init__(self):
        if not (1 <= self.height <= MAX_SIDE and 1 <= self.width <= MAX_SIDE):
            raise GridError(f"raster size {self.height}x{self.width} outside 1..{MAX_SIDE}")
        if len(self.cells) != self.height * self.width:
            raise GridError(
                f"raster has {len(self.cells)} cells, expected {self.height * self.width}"
            )
        try:
            cells = tuple(Color(int(c)) for c in self.cells)
        except ValueError as e:
            raise GridError(f"invalid color value: {e}") from e
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[int]]) -> "Raster":
        """Build a raster from nested lists as found in ARC JSON."""
        if not isinstance(grid, (list, tuple)) or not grid:
            raise GridError("grid must be a non-empty list of rows")
        width = len(grid[0]) if isinstance(grid[0], (list, tuple)) else 0
        cells: List[int] = []
        for row in grid:
            if not isinstance(row, (list, tuple)) or len(row) != width:
                raise GridError("grid rows must be lists of equal length")
            for value in row:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise GridError(f"grid value {value!r} is not an integer")
                cells.append(value)
        return cls(height=len(grid), width=width, cells=tuple(cells))

    def cell(self, row: int, col: int) -> Color:
        return self.cells[row * self.width + col]

    def to_grid(self) -> List[List[int]]:
        return [
            [int(c) for c in self.cells[r * self.width:(r + 1) * self.width]]
            for r in range(self.height)
        ]

    def to_array(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.int8).reshape(self.height, self.width)

    def colors(self) -> frozenset:
        return frozenset(self.cells)

    def canonical_text(self) -> str:
        return json.dumps(self.to_grid(), separators=(",", ":"))


class Region:
    """Sparse pixel set, kept in canonical row-major order."""

    __slots__ = ("_pixels", "_hash")

    def __init__(self, pixels: Iterable[Tuple[Tuple[int, int], int]] = ()):
        mapping: Dict[Loc, Color] = {}
        for loc, color in pixels:
            loc = Loc(int(loc[0]), int(loc[1]))
            if loc in mapping:
                raise ValueError(f"duplicate pixel position {tuple(loc)}")
            mapping[loc] = Color(color)
        self._pixels: Tuple[Tuple[Loc, Color], ...] = tuple(sorted(mapping.items()))
        self._hash = hash(self._pixels)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Loc, Color]) -> "Region":
        """Build from a position->color mapping (positions unique by construction)."""
        region = cls.__new__(cls)
        region._pixels = tuple(sorted((Loc(*loc), Color(c)) for loc, c in mapping.items()))
        region._hash = hash(region._pixels)
        return region

    @property
    def pixels(self) -> Tuple[Tuple[Loc, Color], ...]:
        return self._pixels

    def locations(self) -> List[Loc]:
        return [loc for loc, _ in self._pixels]

    def as_dict(self) -> Dict[Loc, Color]:
        return dict(self._pixels)

    def is_empty(self) -> bool:
        return not self._pixels

    def __len__(self) -> int:
        return len(self._pixels)

    def __iter__(self) -> Iterator[Tuple[Loc, Color]]:
        return iter(self._pixels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Region):
            return NotImplemented
        return self._pixels == other._pixels

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        shown = ", ".join(f"({l.row},{l.col})={c.symbol}" for l, c in self._pixels[:6])
        more = ", ..." if len(self._pixels) > 6 else ""
        return f"Region[{len(self._pixels)}]({shown}{more})"

    def canonical_text(self) -> str:
        return json.dumps(
            [[loc.row, loc.col, int(c)] for loc, c in self._pixels], separators=(",", ":")
        )


def raster_to_region(raster: Raster) -> Region:
    """One pixel per cell, black cells included."""
    return Region.from_mapping({
        Loc(r, c): raster.cells[r * raster.width + c]
        for r in range(raster.height)
        for c in range(raster.width)
    })


def region_to_raster(region: Region) -> Raster:
    """
    Rasterize a region onto a canvas anchored at (0, 0).

    Raises:
        EmptyRegion: if the region has no pixels
        OutOfCanvas: if any coordinate is negative or >= 30
    """
    if region.is_empty():
        raise EmptyRegion("cannot rasterize an empty region")
    for loc, _ in region:
        if not (0 <= loc.row < MAX_SIDE and 0 <= loc.col < MAX_SIDE):
            raise OutOfCanvas(f"pixel {tuple(loc)} lies outside the {MAX_SIDE}x{MAX_SIDE} canvas")
    height = max(loc.row for loc, _ in region) + 1
    width = max(loc.col for loc, _ in region) + 1
    cells = [Color.BLACK] * (height * width)
    for loc, color in region:
        cells[loc.row * width + loc.col] = color
    return Raster(height=height, width=width, cells=tuple(cells))


def bounding_box(region: Region) -> Tuple[Loc, Loc]:
    """Inclusive (top-left, bottom-right) of the minimal enclosing rectangle."""
    if region.is_empty():
        raise EmptyRegion("empty region has no bounding box")
    rows = [loc.row for loc, _ in region]
    cols = [loc.col for loc, _ in region]
    return Loc(min(rows), min(cols)), Loc(max(rows), max(cols))


def canonical_hash(obj) -> str:
    """SHA-256 of an object's canonical text (Raster, Region, Task or Program)."""
    text = obj if isinstance(obj, str) else obj.canonical_text()
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
