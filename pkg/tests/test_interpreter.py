import random

import numpy as np
import pytest

from models.errors import DslRuntimeError, RuntimeErrorKind
from models.grid import Color, Direction, Loc, Orientation, Raster, Region
from dsl import builtins as B
from dsl.interpreter import Interpreter, apply_program_to_raster
from dsl.program import OpCall, Program, SymbolLeaf
from dsl.text import parse_program, read_tree
from dsl.values import Pair
from dsl.workspace import full_template, instantiate, template_for_colors


class _Unmetered:
    def charge(self, n: int) -> None:
        pass


CTX = _Unmetered()


def run(text: str, raster: Raster) -> Raster:
    return apply_program_to_raster(parse_program(text), raster)


def evaluate(text: str, raster: Raster):
    workspace = instantiate(full_template(), raster)
    return Interpreter().evaluate(Program(read_tree(text)), workspace)


def random_region(rng: random.Random) -> Region:
    cells = rng.sample([(r, c) for r in range(10) for c in range(10)], rng.randint(1, 15))
    return Region([(loc, rng.randrange(10)) for loc in cells])


# whole programs against dense-array oracles

def test_identity(random_raster):
    rng = random.Random(0)
    for _ in range(50):
        raster = random_raster(rng)
        assert run("(Scene)", raster) == raster


def test_paint_covers_every_cell():
    raster = Raster.from_grid([[0, 1], [3, 0]])
    assert run("(Paint (Scene) (Red))", raster).to_grid() == [[2, 2], [2, 2]]


@pytest.mark.parametrize("text, oracle", [
    ("(Rotate (Scene) (Cw))", lambda a: np.rot90(a, -1)),
    ("(Rotate (Scene) (Ccw))", lambda a: np.rot90(a, 1)),
    ("(Flip (Scene) (Horizontal))", np.fliplr),
    ("(Flip (Scene) (Vertical))", np.flipud),
    ("(Scale (Scene) (Add (One) (One)))", lambda a: np.kron(a, np.ones((2, 2), dtype=a.dtype))),
    ("(Scale (Scene) (Pair (One) (Add (One) (One))))", lambda a: np.kron(a, np.ones((1, 2), dtype=a.dtype))),
])
def test_geometry_matches_dense_transforms(text, oracle, random_raster):
    program = parse_program(text)
    rng = random.Random(1)
    for _ in range(100):
        raster = random_raster(rng)
        result = apply_program_to_raster(program, raster)
        assert np.array_equal(result.to_array(), oracle(raster.to_array()))


def _components(grid, background: int, diagonal: bool):
    """Union-find over the non-background cells."""
    cells = [(r, c) for r, row in enumerate(grid) for c, v in enumerate(row) if v != background]
    parent = {cell: cell for cell in cells}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    steps = [(0, 1), (1, 0)] + ([(1, 1), (1, -1)] if diagonal else [])
    for r, c in cells:
        for dr, dc in steps:
            other = (r + dr, c + dc)
            if other in parent:
                parent[find(other)] = find((r, c))
    groups = {}
    for cell in cells:
        groups.setdefault(find(cell), set()).add(cell)
    return {frozenset(g) for g in groups.values()}


@pytest.mark.parametrize("connectivity, diagonal", [("N4", False), ("N8", True)])
def test_floodfill_matches_union_find(connectivity, diagonal, random_raster):
    rng = random.Random(2)
    for _ in range(100):
        raster = random_raster(rng, max_side=8, colors=3)
        components = evaluate(f"(FloodFill (Scene) (Black) ({connectivity}))", raster)
        found = {frozenset(region.locations()) for region in components}
        assert found == _components(raster.to_grid(), 0, diagonal)
        firsts = [region.pixels[0][0] for region in components]
        assert firsts == sorted(firsts)


def test_subprograms_see_element_and_workspace():
    raster = Raster.from_grid([[1, 2], [3, 4]])
    assert evaluate("(Len (Pixels (Scene)))", raster) == 4
    assert evaluate("(Map (Pixels (Scene)) (Fn (Area (Scene))))", raster) == (4, 4, 4, 4)
    assert evaluate("(MostCommon (Pixels (Scene)) (Fn (Area (FunctionalInput))))", raster) == 1


def test_type_checked_evaluation_agrees(random_raster):
    interpreter = Interpreter(check_types=True)
    program = parse_program(
        "(Draw (Scene) (Map (Filter (Pixels (Scene)) (Fn (Equals (Area (FunctionalInput)) (One))))"
        " (Fn (Paint (FunctionalInput) (Teal)))))"
    )
    rng = random.Random(4)
    for _ in range(20):
        raster = random_raster(rng)
        expected = apply_program_to_raster(program, raster)
        assert apply_program_to_raster(program, raster, interpreter) == expected


# runtime errors

@pytest.mark.parametrize("text, grid, kind", [
    ("(Head (Filter (Pixels (Scene)) (Fn (Equals (FunctionalInput) (Paint (FunctionalInput) (Red))))))",
     [[1, 1]], RuntimeErrorKind.EMPTY_LIST_ACCESS),
    ("(Shift (Scene) (Loc (Neg (One)) (Zero)))", [[1]], RuntimeErrorKind.OUT_OF_CANVAS),
    ("(Crop (Scene) (Loc (One) (One)) (Loc (Zero) (Zero)))", [[1, 2], [3, 4]], RuntimeErrorKind.DIVERGENT_VALUE),
    ("(Crop (Scene) (Loc (One) (One)) (Loc (One) (One)))", [[1]], RuntimeErrorKind.EMPTY_REGION),
])
def test_runtime_errors(text, grid, kind):
    with pytest.raises(DslRuntimeError) as info:
        run(text, Raster.from_grid(grid))
    assert info.value.kind is kind


def test_runtime_error_names_the_failing_node():
    with pytest.raises(DslRuntimeError) as info:
        run("(Head (Filter (Pixels (Scene)) (Fn (Equals (FunctionalInput) (Paint (FunctionalInput) (Red))))))",
            Raster.from_grid([[1]]))
    assert info.value.node_index == 0


def test_step_budget():
    program = parse_program("(Paint (Scene) (Red))")
    with pytest.raises(DslRuntimeError) as info:
        apply_program_to_raster(program, Raster.from_grid([[1] * 3] * 3), Interpreter(step_budget=5))
    assert info.value.kind is RuntimeErrorKind.DIVERGENT_VALUE


def test_unbound_symbol():
    workspace = instantiate(template_for_colors([0, 1]), Raster.from_grid([[1]]))
    with pytest.raises(DslRuntimeError) as info:
        Interpreter().evaluate(Program(read_tree("(Paint (Scene) (Red))")), workspace)
    assert info.value.kind is RuntimeErrorKind.UNBOUND_SYMBOL


def test_arity_mismatch():
    workspace = instantiate(full_template(), Raster.from_grid([[1]]))
    with pytest.raises(DslRuntimeError) as info:
        Interpreter().evaluate(Program(OpCall("Paint", (SymbolLeaf("Scene"),))), workspace)
    assert info.value.kind is RuntimeErrorKind.ARITY_MISMATCH


# geometry laws on sparse regions

def test_rotation_laws():
    rng = random.Random(5)
    for _ in range(300):
        region = random_region(rng)
        turned = region
        for _ in range(4):
            turned = B.op_rotate(CTX, turned, Direction.CW)
        assert turned == region
        assert B.op_rotate(CTX, B.op_rotate(CTX, region, Direction.CW), Direction.CCW) == region


def test_flip_shift_scale_laws():
    rng = random.Random(6)
    for _ in range(300):
        region = random_region(rng)
        for orientation in Orientation:
            assert B.op_flip(CTX, B.op_flip(CTX, region, orientation), orientation) == region
        dr, dc = rng.randint(-5, 5), rng.randint(-5, 5)
        assert B.op_shift(CTX, B.op_shift(CTX, region, Loc(dr, dc)), Loc(-dr, -dc)) == region
        assert B.op_shift(CTX, B.op_shift(CTX, region, Pair(dr, dc)), Pair(-dr, -dc)) == region
        assert B.op_scale(CTX, region, 1) == region


def test_scale_factor_below_one():
    with pytest.raises(DslRuntimeError) as info:
        B.op_scale(CTX, Region([((0, 0), 1)]), 0)
    assert info.value.kind is RuntimeErrorKind.DIVERGENT_VALUE


# list and value builtins against reference semantics

def test_list_operations():
    rng = random.Random(7)
    for _ in range(500):
        a = tuple(rng.randrange(5) for _ in range(rng.randint(0, 8)))
        b = tuple(rng.randrange(5) for _ in range(rng.randint(0, 8)))
        assert B.op_deduplicate(CTX, a) == tuple(dict.fromkeys(a))
        assert B.op_diff(CTX, a, b) == tuple(x for x in a if x not in b)
        assert B.op_intersection(CTX, a, b) == tuple(x for x in a if x in b)
        assert B.op_union(CTX, a, b) == a + b
        assert B.op_reverse(CTX, a) == a[::-1]
        assert B.op_zip(CTX, a, b) == tuple(Pair(x, y) for x, y in zip(a, b))
        assert len(B.op_zip(CTX, a, b)) == min(len(a), len(b))
        assert B.op_len(CTX, a) == len(a)


def test_sort_is_stable():
    rng = random.Random(8)
    for _ in range(500):
        items = tuple((rng.randrange(3), i) for i in range(rng.randint(0, 8)))
        assert B.op_sort(CTX, items, lambda x: x[0]) == tuple(sorted(items, key=lambda x: x[0]))


def test_group_by_and_most_common():
    assert B.op_groupby(CTX, (1, 2, 3, 4, 5), lambda x: x % 2) == (Pair(1, (1, 3, 5)), Pair(0, (2, 4)))
    assert B.op_mostcommon(CTX, (1, 2, 2, 1), lambda x: x) == 1
    assert B.op_mostcommon(CTX, (3, 2, 2), lambda x: x) == 2


@pytest.mark.parametrize("op", [B.op_head, B.op_tail])
def test_empty_list_access(op):
    with pytest.raises(DslRuntimeError) as info:
        op(CTX, ())
    assert info.value.kind is RuntimeErrorKind.EMPTY_LIST_ACCESS


def test_arithmetic():
    assert B.op_add(CTX, Loc(1, 2), Loc(3, 4)) == Loc(4, 6)
    assert B.op_sub(CTX, 5, 7) == -2
    assert B.op_neg(CTX, True) is False
    assert B.op_neg(CTX, 3) == -3


def test_line_includes_both_endpoints():
    rng = random.Random(9)
    for _ in range(500):
        a = Loc(rng.randrange(10), rng.randrange(10))
        b = Loc(rng.randrange(10), rng.randrange(10))
        cells = B.line_cells(a, b)
        assert cells[0] == a and cells[-1] == b
        assert len(cells) == max(abs(a.row - b.row), abs(a.col - b.col)) + 1


def test_rect_and_draw():
    rect = B.op_rect(CTX, Loc(1, 1), Loc(2, 3), Color.RED)
    assert len(rect) == 6
    with pytest.raises(DslRuntimeError):
        B.op_rect(CTX, Loc(2, 2), Loc(1, 1), Color.RED)
    base = Region([((1, 1), 1), ((0, 0), 1)])
    over = (Region([((1, 1), 2)]), Region([((1, 1), 3)]))
    drawn = B.op_draw(CTX, base, over)
    assert drawn.as_dict() == {Loc(0, 0): Color.BLUE, Loc(1, 1): Color.GREEN}


def test_corners():
    region = Region([((2, 5), 1), ((4, 1), 1)])
    assert B.op_ltc(CTX, region) == Loc(2, 1)
    assert B.op_rtc(CTX, region) == Loc(2, 5)
    assert B.op_lbc(CTX, region) == Loc(4, 1)
    assert B.op_rbc(CTX, region) == Loc(4, 5)
    assert (B.op_width(CTX, region), B.op_height(CTX, region)) == (5, 3)
