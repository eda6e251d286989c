"""
TaskProvider tool for reading ARC task directories.
"""

import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import ValidationError

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import GridError, MalformedTask
from models.grid import Raster
from models.schema import IngestFailure, IngestManifest
from models.task import Task, TaskOrigin

logger = logging.getLogger(__name__)

SPLITS = {"training": "arc-train", "evaluation": "arc-eval"}


class TaskProvider:
    """Tool for validating ARC directories and loading their tasks."""

    def __init__(self):
        self.manifest: Optional[IngestManifest] = None

    def validate_path(self, path: str) -> Path:
        """
        Validate that the provided path is a readable directory.

        Raises:
            FileNotFoundError: If the path is missing or not a directory
        """
        root = Path(path).resolve()
        if not root.exists():
            raise FileNotFoundError(f"ARC path does not exist: {path}")
        if not root.is_dir():
            raise FileNotFoundError(f"ARC path is not a directory: {path}")
        return root

    def load_task(self, file: Path, origin: TaskOrigin) -> Task:
        """
        Parse one ARC JSON file.

        Raises:
            MalformedTask: bad JSON, missing keys, bad dimensions or colors
        """
        try:
            data = json.loads(file.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            raise MalformedTask(f"unreadable JSON: {e}", file.name) from e
        if not isinstance(data, dict) or not isinstance(data.get("train"), list):
            raise MalformedTask('expected an object with a "train" array', file.name)
        if not isinstance(data.get("test", []), list):
            raise MalformedTask('"test" must be an array', file.name)
        for item in data["train"] + data.get("test", []):
            if not isinstance(item, dict) or "input" not in item:
                raise MalformedTask('every pair needs an "input" grid', file.name)
        for item in data["train"]:
            if item.get("output") is None:
                raise MalformedTask('every demonstration needs an "output" grid', file.name)
        try:
            return Task.from_arc_json(data, origin=origin, name=file.stem)
        except GridError as e:
            raise MalformedTask(str(e), file.name) from e
        except ValidationError as e:
            raise MalformedTask(f"invalid task: {e.errors()[0]['msg']}", file.name) from e

    def load_any(self, path: str) -> Union[Task, Raster]:
        """
        Read a file holding either an ARC task object or a bare grid.

        Raises:
            FileNotFoundError: if the file is missing
            MalformedTask: if the content is neither
        """
        file = Path(path)
        if not file.is_file():
            raise FileNotFoundError(f"No such file: {path}")
        try:
            data = json.loads(file.read_text(encoding="utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise MalformedTask(f"unreadable JSON: {e}", file.name) from e
        if isinstance(data, list):
            try:
                return Raster.from_grid(data)
            except GridError as e:
                raise MalformedTask(str(e), file.name) from e
        return self.load_task(file, "arc-train")

    def load_split(self, directory: Path, origin: TaskOrigin, manifest: IngestManifest) -> List[Task]:
        tasks = []
        for file in sorted(directory.glob("*.json")):
            try:
                task = self.load_task(file, origin)
            except MalformedTask as e:
                logger.warning(f"Skipping {file.name}: {e}")
                manifest.failures.append(IngestFailure(filename=str(file), message=str(e)))
                continue
            tasks.append(task)
            manifest.loaded.append(task.name)
        return tasks

    def ingest(self, path: str) -> List[Task]:
        """
        Load every task under an ARC split directory, or under the
        ``training/`` and ``evaluation/`` splits of an ARC root.

        Files are read in filename order; malformed files are skipped and
        recorded in ``self.manifest``.

        Args:
            path: split directory or ARC root

        Returns:
            Tasks in a stable order (training split first for a root)
        """
        root = self.validate_path(path)
        manifest = IngestManifest(root=str(root))
        splits = [(root / name, origin) for name, origin in SPLITS.items() if (root / name).is_dir()]
        if not splits:
            origin = "arc-eval" if root.name == "evaluation" else "arc-train"
            splits = [(root, origin)]
        tasks: List[Task] = []
        for directory, origin in splits:
            tasks.extend(self.load_split(directory, origin, manifest))
        self.manifest = manifest
        logger.info(f"Ingested {manifest.count} tasks from {root} ({len(manifest.failures)} skipped)")
        return tasks


def ingest_arc(path: str) -> Tuple[List[Task], IngestManifest]:
    provider = TaskProvider()
    tasks = provider.ingest(path)
    return tasks, provider.manifest
