import pytest

from models.errors import ConfigError
from models.schema import LoopConfig
from tools.config_loader import ConfigLoader, load_config


@pytest.fixture
def conf(tmp_path):
    def write(text: str):
        path = tmp_path / "loop.conf"
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


def test_defaults():
    assert ConfigLoader(environ={}).load() == LoopConfig()


def test_file_values(conf):
    path = conf("# tuned\nattempts_per_task = 3  # fewer\n\ngeneration.max_depth=5\n")
    config = ConfigLoader(environ={}).load(path)
    assert config.attempts_per_task == 3
    assert config.generation.max_depth == 5
    assert config.generation.max_nodes == LoopConfig().generation.max_nodes


def test_layers_override_in_order(conf):
    path = conf("attempts_per_task=3\njobs=2\nrng_seed=11\n")
    environ = {"ARCLOOP_ATTEMPTS_PER_TASK": "4", "ARCLOOP_RNG_SEED": "12", "OTHER": "x"}
    config = ConfigLoader(environ=environ).load(path, {"attempts_per_task": 6, "jobs": None})
    assert config.attempts_per_task == 6
    assert config.rng_seed == 12
    assert config.jobs == 2


def test_nested_environment_key():
    config = load_config(environ={"ARCLOOP_GENERATION__MAX_DEPTH": "3"})
    assert config.generation.max_depth == 3


def test_invalid_value_names_the_key(conf):
    with pytest.raises(ConfigError, match="jobs"):
        ConfigLoader(environ={}).load(conf("jobs=0\n"))
    with pytest.raises(ConfigError, match="generation.max_nodes"):
        ConfigLoader(environ={"ARCLOOP_GENERATION__MAX_NODES": "many"}).load()


def test_unknown_key(conf):
    with pytest.raises(ConfigError, match="colour"):
        ConfigLoader(environ={}).load(conf("colour=red\n"))


def test_line_without_equals(conf):
    with pytest.raises(ConfigError, match=":2:"):
        ConfigLoader(environ={}).load(conf("jobs=2\njobs\n"))


def test_value_used_as_section(conf):
    with pytest.raises(ConfigError, match="not a section"):
        ConfigLoader(environ={}).load(conf("jobs=2\njobs.extra=1\n"))


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        ConfigLoader(environ={}).load(str(tmp_path / "absent.conf"))
