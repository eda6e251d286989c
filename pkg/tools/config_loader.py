"""
ConfigLoader tool: builds a LoopConfig from layered sources.

Precedence, lowest first: model defaults, a ``key=value`` config file,
``ARCLOOP_*`` environment variables (``.env`` included), explicit overrides.
Nested fields use dotted keys in files (``generation.max_nodes=32``) and a
double underscore in the environment (``ARCLOOP_GENERATION__MAX_NODES=32``).
"""

import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import ConfigError
from models.schema import LoopConfig

logger = logging.getLogger(__name__)

ENV_PREFIX = "ARCLOOP_"


def _set_dotted(target: Dict[str, Any], key: str, value: Any) -> None:
    parts = key.split(".")
    node = target
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{key}: {part} is not a section")
    node[parts[-1]] = value


class ConfigLoader:
    """Merges config layers and validates the result."""

    def __init__(self, environ: Optional[Mapping[str, str]] = None, use_dotenv: bool = True):
        if environ is None and use_dotenv:
            load_dotenv()
        self.environ = os.environ if environ is None else environ

    def read_file(self, path: str) -> Dict[str, str]:
        """
        Parse a ``key=value`` file; blank lines and ``#`` comments are ignored.

        Raises:
            ConfigError: for a line without ``=``
            OSError: if the file cannot be read
        """
        values: Dict[str, str] = {}
        for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{number}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
        return values

    def read_env(self) -> Dict[str, str]:
        return {
            name[len(ENV_PREFIX):].lower().replace("__", "."): value
            for name, value in self.environ.items()
            if name.startswith(ENV_PREFIX)
        }

    def load(self, config_path: Optional[str] = None,
             overrides: Optional[Mapping[str, Any]] = None) -> LoopConfig:
        """
        Build the effective configuration.

        Args:
            config_path: optional key=value file
            overrides: dotted keys from explicit CLI flags; None values are skipped

        Raises:
            ConfigError: naming the offending key
        """
        layers = []
        if config_path:
            layers.append(("file", self.read_file(config_path)))
        layers.append(("environment", self.read_env()))
        layers.append(("flags", {k: v for k, v in (overrides or {}).items() if v is not None}))

        merged: Dict[str, Any] = {}
        for source, values in layers:
            for key, value in values.items():
                _set_dotted(merged, key, value)
                logger.debug(f"config {key}={value} ({source})")
        try:
            return LoopConfig.model_validate(merged)
        except ValidationError as e:
            first = e.errors()[0]
            key = ".".join(str(part) for part in first["loc"])
            raise ConfigError(f"invalid config key {key}: {first['msg']}") from e


def load_config(config_path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None,
                environ: Optional[Mapping[str, str]] = None) -> LoopConfig:
    return ConfigLoader(environ=environ).load(config_path, overrides)
