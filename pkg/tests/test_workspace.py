from models.grid import Color, Raster, raster_to_region
from dsl.types import COLOR, REGION
from dsl.workspace import CONSTANT_VALUES, build_template, full_template, instantiate


def test_template_lists_constants_task_colors_and_scene(make_task):
    task = make_task([([[0, 1]], [[1, 1]])], tests=[([[0]], [[3]])])
    template = build_template(task)
    assert template.names == list(CONSTANT_VALUES) + ["Black", "Blue", "Green", "Scene"]
    assert template.type_of("Green") == COLOR
    assert template.type_of("Scene") == REGION
    assert "Red" not in template


def test_full_template_has_every_color():
    names = full_template().names
    assert all(c.symbol in names for c in Color)
    assert len(names) == len(CONSTANT_VALUES) + 10 + 1


def test_instantiate_binds_scene_per_input():
    raster = Raster.from_grid([[0, 4], [4, 0]])
    workspace = instantiate(full_template(), raster)
    assert workspace.lookup("Scene") == raster_to_region(raster)
    assert workspace.lookup("Yellow") is Color.YELLOW
    assert workspace.lookup("Zero") == 0
    assert "FunctionalInput" not in workspace
