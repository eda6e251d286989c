import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from models.grid import Raster
from models.schema import GenLimits, LoopConfig
from models.task import Example, Task


def _task(pairs, tests=(), origin="arc-train", name=None) -> Task:
    return Task(
        demonstrations=tuple(Example(input=Raster.from_grid(i), output=Raster.from_grid(o)) for i, o in pairs),
        tests=tuple(
            Example(input=Raster.from_grid(i), output=Raster.from_grid(o) if o is not None else None)
            for i, o in tests
        ),
        origin=origin,
        name=name,
    )


GRID_A = [[0, 1, 0], [1, 1, 0], [0, 0, 2]]
GRID_B = [[3, 0], [0, 3], [3, 3]]
GRID_C = [[4, 4, 0, 1]]
GRID_D = [[5, 0], [0, 6]]


@pytest.fixture
def make_task():
    return _task


@pytest.fixture
def random_raster():
    """Factory for seeded random rasters of at most ``max_side`` cells per side."""
    def build(rng: random.Random, max_side: int = 6, colors: int = 10) -> Raster:
        h, w = rng.randint(1, max_side), rng.randint(1, max_side)
        return Raster.from_grid([[rng.randrange(colors) for _ in range(w)] for _ in range(h)])
    return build


@pytest.fixture
def identity_task() -> Task:
    """Outputs equal inputs; the inputs differ across demonstrations."""
    return _task([(GRID_A, GRID_A), (GRID_B, GRID_B)], tests=[(GRID_C, GRID_C)], name="identity")


@pytest.fixture
def paint_red_task() -> Task:
    """Every cell becomes red."""
    def red(grid):
        return [[2 for _ in row] for row in grid]
    return _task([(GRID_A, red(GRID_A)), (GRID_B, red(GRID_B))], tests=[(GRID_D, red(GRID_D))], name="paint-red")


@pytest.fixture
def corpus(make_task):
    """A handful of small training tasks plus one evaluation task."""
    def flip(grid):
        return [list(reversed(row)) for row in grid]
    return [
        make_task([(GRID_A, flip(GRID_A)), (GRID_B, flip(GRID_B))], tests=[(GRID_D, flip(GRID_D))], name="flip"),
        make_task([(GRID_B, GRID_B), (GRID_C, GRID_C)], tests=[(GRID_A, GRID_A)], name="copy"),
        make_task([(GRID_C, [[1]]), (GRID_D, [[1]])], tests=[(GRID_A, [[1]])], name="dot"),
        make_task([(GRID_D, GRID_A), (GRID_A, GRID_D)], tests=[(GRID_B, GRID_C)], name="swap"),
        make_task([(GRID_A, GRID_A), (GRID_D, GRID_D)], tests=[(GRID_C, GRID_C)], origin="arc-eval", name="held-out"),
    ]


def _write_task(path: Path, task: Task) -> None:
    path.write_text(json.dumps(task.to_arc_json()), encoding="utf-8")


@pytest.fixture
def arc_dir(tmp_path, corpus) -> Path:
    """An ARC root with ``training/`` and ``evaluation/`` splits."""
    root = tmp_path / "arc"
    (root / "training").mkdir(parents=True)
    (root / "evaluation").mkdir()
    for task in corpus:
        split = "evaluation" if task.origin == "arc-eval" else "training"
        _write_task(root / split / f"{task.name}.json", task)
    return root


@pytest.fixture
def task_file(tmp_path, identity_task) -> Path:
    path = tmp_path / "identity.json"
    _write_task(path, identity_task)
    return path


@pytest.fixture
def small_config() -> LoopConfig:
    """Loop settings small enough for a few cycles in a unit test."""
    return LoopConfig(
        exploration_min_tasks=3,
        exploration_min_unique_solutions=2,
        reduction_categories=2,
        tasks_per_category=2,
        stagnation_window=2,
        attempts_per_task=2,
        training_subset=16,
        max_exploration_iterations=300,
        frozen_synth_size=2,
        store_sample_size=4,
        rng_seed=7,
        generation=GenLimits(max_nodes=8, max_depth=4, max_nesting=1),
    )
