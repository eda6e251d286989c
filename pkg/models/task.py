"""
ARC task model.
"""

import json
from functools import cached_property
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, InstanceOf

from models.grid import Raster, canonical_hash

TaskOrigin = Literal["arc-train", "arc-eval", "synthetic"]


class Example(BaseModel):
    """One input/output raster pair; output absent for blind test inputs."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    input: InstanceOf[Raster] = Field(description="Input raster")
    output: Optional[InstanceOf[Raster]] = Field(default=None, description="Expected output raster")

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"input": self.input.to_grid()}
        if self.output is not None:
            data["output"] = self.output.to_grid()
        return data


class Task(BaseModel):
    """Demonstrations plus test pairs, as in the ARC JSON files."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    demonstrations: Tuple[Example, ...] = Field(min_length=1, description="Demonstration pairs")
    tests: Tuple[Example, ...] = Field(default=(), description="Test pairs")
    origin: TaskOrigin = Field(default="arc-train", description="Where the task came from")
    name: Optional[str] = Field(default=None, description="File stem for ARC tasks")

    @classmethod
    def from_arc_json(cls, data: Dict[str, Any], origin: TaskOrigin = "arc-train",
                      name: Optional[str] = None) -> "Task":
        def pairs(key: str) -> Tuple[Example, ...]:
            return tuple(
                Example(
                    input=Raster.from_grid(item["input"]),
                    output=Raster.from_grid(item["output"]) if item.get("output") is not None else None,
                )
                for item in data.get(key, [])
            )
        return cls(demonstrations=pairs("train"), tests=pairs("test"), origin=origin, name=name)

    def to_arc_json(self) -> Dict[str, List[Dict[str, Any]]]:
        return {
            "train": [d.to_json() for d in self.demonstrations],
            "test": [t.to_json() for t in self.tests],
        }

    def rasters(self) -> List[Raster]:
        """Every raster of the task: demonstration inputs/outputs and test inputs/outputs."""
        found: List[Raster] = []
        for example in self.demonstrations + self.tests:
            found.append(example.input)
            if example.output is not None:
                found.append(example.output)
        return found

    def canonical_text(self) -> str:
        return json.dumps(self.to_arc_json(), separators=(",", ":"), sort_keys=True)

    @cached_property
    def digest(self) -> str:
        return canonical_hash(self)

    @property
    def label(self) -> str:
        return self.name or self.digest[:12]
