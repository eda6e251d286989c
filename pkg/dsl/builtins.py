"""
Implementations of the 40 DSL operations.

Every builtin takes the evaluation context first (for step accounting) and
its already-evaluated arguments after it. Higher-order builtins receive the
subprogram as a one-argument callable.
"""

from collections import Counter
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
from scipy import ndimage

from models.errors import DslRuntimeError, EmptyRegion, RuntimeErrorKind
from models.grid import Color, Connectivity, Direction, Loc, Orientation, Region, bounding_box
from dsl.values import Pair, is_list

_N4 = ndimage.generate_binary_structure(2, 1)
_N8 = ndimage.generate_binary_structure(2, 2)


def _bbox(region: Region) -> Tuple[Loc, Loc]:
    try:
        return bounding_box(region)
    except EmptyRegion as e:
        raise DslRuntimeError(RuntimeErrorKind.EMPTY_REGION, str(e)) from e


def _nonempty(lst: Tuple, op: str) -> None:
    if not lst:
        raise DslRuntimeError(RuntimeErrorKind.EMPTY_LIST_ACCESS, f"{op} of an empty list")


def _divergent(message: str) -> DslRuntimeError:
    return DslRuntimeError(RuntimeErrorKind.DIVERGENT_VALUE, message)


# arithmetic

def op_add(ctx, a, b):
    if isinstance(a, Loc):
        return Loc(a.row + b.row, a.col + b.col)
    return a + b


def op_sub(ctx, a, b):
    if isinstance(a, Loc):
        return Loc(a.row - b.row, a.col - b.col)
    return a - b


def op_neg(ctx, a):
    if isinstance(a, bool):
        return not a
    return -a


# properties

def op_equals(ctx, a, b):
    return a == b


def op_len(ctx, lst):
    return len(lst)


def op_area(ctx, region: Region):
    _bbox(region)
    return len(region)


def op_width(ctx, region: Region):
    lt, rb = _bbox(region)
    return rb.col - lt.col + 1


def op_height(ctx, region: Region):
    lt, rb = _bbox(region)
    return rb.row - lt.row + 1


def op_ltc(ctx, region: Region):
    lt, _ = _bbox(region)
    return lt


def op_rtc(ctx, region: Region):
    lt, rb = _bbox(region)
    return Loc(lt.row, rb.col)


def op_lbc(ctx, region: Region):
    lt, rb = _bbox(region)
    return Loc(rb.row, lt.col)


def op_rbc(ctx, region: Region):
    _, rb = _bbox(region)
    return rb


# list and pair structure

def op_head(ctx, lst):
    _nonempty(lst, "Head")
    return lst[0]


def op_tail(ctx, lst):
    _nonempty(lst, "Tail")
    return lst[-1]


def op_reverse(ctx, lst):
    return tuple(reversed(lst))


def op_deduplicate(ctx, lst):
    return tuple(dict.fromkeys(lst))


def op_diff(ctx, a, b):
    exclude = set(b)
    return tuple(x for x in a if x not in exclude)


def op_intersection(ctx, a, b):
    keep = set(b)
    return tuple(x for x in a if x in keep)


def op_union(ctx, a, b):
    return tuple(a) + tuple(b)


def op_zip(ctx, a, b):
    return tuple(Pair(x, y) for x, y in zip(a, b))


def op_first(ctx, p: Pair):
    return p.first


def op_second(ctx, p: Pair):
    return p.second


def op_pair(ctx, a, b):
    return Pair(a, b)


def op_loc(ctx, row, col):
    return Loc(row, col)


# region construction

def op_rect(ctx, lt: Loc, rb: Loc, color: Color):
    if lt.row > rb.row or lt.col > rb.col:
        raise _divergent(f"Rect corners {tuple(lt)} and {tuple(rb)} are inverted")
    ctx.charge((rb.row - lt.row + 1) * (rb.col - lt.col + 1))
    return Region.from_mapping({
        Loc(r, c): color
        for r in range(lt.row, rb.row + 1)
        for c in range(lt.col, rb.col + 1)
    })


def line_cells(a: Loc, b: Loc) -> List[Loc]:
    """Integer line tracing between two points, both endpoints included."""
    col, row = a.col, a.row
    dx, dy = abs(b.col - a.col), -abs(b.row - a.row)
    sx = 1 if b.col >= a.col else -1
    sy = 1 if b.row >= a.row else -1
    err = dx + dy
    cells = []
    while True:
        cells.append(Loc(row, col))
        if col == b.col and row == b.row:
            return cells
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            col += sx
        if e2 <= dx:
            err += dx
            row += sy


def op_line(ctx, a: Loc, b: Loc, color: Color):
    ctx.charge(max(abs(b.row - a.row), abs(b.col - a.col)) + 1)
    return Region.from_mapping({loc: color for loc in line_cells(a, b)})


# region transforms

def op_paint(ctx, region: Region, color: Color):
    return Region.from_mapping({loc: color for loc, _ in region})


def op_crop(ctx, region: Region, lt: Loc, rb: Loc):
    if lt.row > rb.row or lt.col > rb.col:
        raise _divergent(f"Crop corners {tuple(lt)} and {tuple(rb)} are inverted")
    return Region.from_mapping({
        loc: c for loc, c in region
        if lt.row <= loc.row <= rb.row and lt.col <= loc.col <= rb.col
    })


def op_draw(ctx, base: Region, over):
    canvas: Dict[Loc, Color] = base.as_dict()
    overlays = over if is_list(over) else (over,)
    for region in overlays:
        canvas.update(region.pixels)
    return Region.from_mapping(canvas)


def op_flip(ctx, region: Region, orientation: Orientation):
    lt, rb = _bbox(region)
    if orientation is Orientation.HORIZONTAL:
        return Region.from_mapping({Loc(l.row, lt.col + rb.col - l.col): c for l, c in region})
    return Region.from_mapping({Loc(lt.row + rb.row - l.row, l.col): c for l, c in region})


def op_rotate(ctx, region: Region, direction: Direction):
    lt, rb = _bbox(region)
    height, width = rb.row - lt.row + 1, rb.col - lt.col + 1
    rotated = {}
    for loc, color in region:
        i, j = loc.row - lt.row, loc.col - lt.col
        if direction is Direction.CW:
            ni, nj = j, height - 1 - i
        else:
            ni, nj = width - 1 - j, i
        rotated[Loc(lt.row + ni, lt.col + nj)] = color
    return Region.from_mapping(rotated)


def op_scale(ctx, region: Region, factor):
    kr, kc = (factor.first, factor.second) if isinstance(factor, Pair) else (factor, factor)
    if kr < 1 or kc < 1:
        raise _divergent(f"Scale factor ({kr}, {kc}) below 1")
    lt, _ = _bbox(region)
    ctx.charge(len(region) * kr * kc)
    scaled = {}
    for loc, color in region:
        i, j = loc.row - lt.row, loc.col - lt.col
        for a in range(kr):
            for b in range(kc):
                scaled[Loc(lt.row + i * kr + a, lt.col + j * kc + b)] = color
    return Region.from_mapping(scaled)


def op_shift(ctx, region: Region, delta):
    dr, dc = (delta.first, delta.second) if isinstance(delta, Pair) else (delta.row, delta.col)
    return Region.from_mapping({Loc(l.row + dr, l.col + dc): c for l, c in region})


def op_pixels(ctx, region: Region):
    return tuple(Region.from_mapping({loc: c}) for loc, c in region)


def op_floodfill(ctx, region: Region, background: Color, connectivity: Connectivity):
    """
    Connected components of the non-background pixels, connectivity by
    position only; components keep absolute positions and colors and are
    ordered by their first pixel in row-major order.
    """
    foreground = [(loc, c) for loc, c in region if c != background]
    if not foreground:
        return ()
    rows = [loc.row for loc, _ in foreground]
    cols = [loc.col for loc, _ in foreground]
    r0, c0 = min(rows), min(cols)
    height, width = max(rows) - r0 + 1, max(cols) - c0 + 1
    ctx.charge(height * width)
    mask = np.zeros((height, width), dtype=bool)
    mask[np.array(rows) - r0, np.array(cols) - c0] = True
    structure = _N4 if connectivity is Connectivity.N4 else _N8
    labels, count = ndimage.label(mask, structure=structure)
    components: List[Dict[Loc, Color]] = [{} for _ in range(count)]
    for loc, color in foreground:
        components[labels[loc.row - r0, loc.col - c0] - 1][loc] = color
    regions = [Region.from_mapping(comp) for comp in components]
    regions.sort(key=lambda reg: reg.pixels[0][0])
    return tuple(regions)


# higher-order

def op_map(ctx, lst, fn: Callable[[Any], Any]):
    return tuple(fn(x) for x in lst)


def op_filter(ctx, lst, fn: Callable[[Any], Any]):
    return tuple(x for x in lst if fn(x))


def op_sort(ctx, lst, fn: Callable[[Any], Any]):
    keyed = [(fn(x), i, x) for i, x in enumerate(lst)]
    keyed.sort(key=lambda item: (item[0], item[1]))
    return tuple(x for _, _, x in keyed)


def op_groupby(ctx, lst, fn: Callable[[Any], Any]):
    groups: Dict[Any, List[Any]] = {}
    for x in lst:
        groups.setdefault(fn(x), []).append(x)
    return tuple(Pair(key, tuple(members)) for key, members in groups.items())


def op_mostcommon(ctx, lst, fn: Callable[[Any], Any]):
    _nonempty(lst, "MostCommon")
    keys = [fn(x) for x in lst]
    counts = Counter(keys)
    best = max(counts.values())
    return next(k for k in keys if counts[k] == best)


BUILTINS: Dict[str, Callable[..., Any]] = {
    "Add": op_add,
    "Area": op_area,
    "Crop": op_crop,
    "Deduplicate": op_deduplicate,
    "Diff": op_diff,
    "Draw": op_draw,
    "Equals": op_equals,
    "Filter": op_filter,
    "First": op_first,
    "Flip": op_flip,
    "FloodFill": op_floodfill,
    "GroupBy": op_groupby,
    "Head": op_head,
    "Height": op_height,
    "Intersection": op_intersection,
    "LBC": op_lbc,
    "LTC": op_ltc,
    "Len": op_len,
    "Line": op_line,
    "Loc": op_loc,
    "Map": op_map,
    "MostCommon": op_mostcommon,
    "Neg": op_neg,
    "Paint": op_paint,
    "Pair": op_pair,
    "Pixels": op_pixels,
    "RBC": op_rbc,
    "RTC": op_rtc,
    "Rect": op_rect,
    "Reverse": op_reverse,
    "Rotate": op_rotate,
    "Scale": op_scale,
    "Second": op_second,
    "Shift": op_shift,
    "Sort": op_sort,
    "Sub": op_sub,
    "Tail": op_tail,
    "Union": op_union,
    "Width": op_width,
    "Zip": op_zip,
}
