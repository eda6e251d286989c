"""
TaskStore tool: the many-to-many store of (task, program) pairs.

Everything lives in one append-only log, ``store.log``, under the store
directory: a versioned header line, then one JSON record per line. The
in-memory indices are rebuilt by replaying the log, so a crash can lose at
most a trailing partial line.

Two relations are kept. ``known`` holds every link ever offered and drives
duplicate detection and Reduction categories. ``active`` is S itself: known
links whose task is not currently marked learned.
"""

import hashlib
import json
import logging
import sys
import threading
from collections import defaultdict
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Set, Tuple

from pydantic import ValidationError

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import ArcLoopError, StoreError
from models.schema import StoreRecord
from models.task import Task
from dsl.program import Program
from dsl.text import canonical_program_text, parse_program

logger = logging.getLogger(__name__)

LOG_NAME = "store.log"
HEADER = {"format": "arcloop-store", "version": 1}

Link = Tuple[str, str]


class StoreOutcome(str, Enum):
    INSERTED = "inserted"
    DUPLICATE = "duplicate"
    REJECTED = "rejected"


def _header_line() -> str:
    return json.dumps(HEADER, sort_keys=True) + "\n"


def _encode(record: StoreRecord) -> str:
    return json.dumps(record.model_dump(), sort_keys=True, separators=(",", ":"))


class TaskStore:
    """Append-only, digest-keyed store with indices in both directions."""

    def __init__(self, directory: Optional[str] = None,
                 verifier: Optional[Callable[[Program, Task], bool]] = None):
        """
        Args:
            directory: where ``store.log`` lives; None keeps the store in memory
            verifier: optional check run before a link is inserted
        """
        self.directory = Path(directory) if directory else None
        self.verifier = verifier
        self._lock = threading.Lock()
        self._reset()
        if self.directory is not None:
            self._open()

    def _reset(self) -> None:
        self.tasks: Dict[str, Task] = {}
        self.programs: Dict[str, Program] = {}
        self.known: Dict[str, List[str]] = defaultdict(list)
        self.known_by_program: Dict[str, List[str]] = defaultdict(list)
        self.link_cycle: Dict[Link, int] = {}
        self.learned: Set[str] = set()
        self.not_learned: Set[str] = set()
        self.pool: List[str] = []
        self._pool_set: Set[str] = set()

    @property
    def log_path(self) -> Optional[Path]:
        return self.directory / LOG_NAME if self.directory else None

    # persistence

    def _open(self) -> None:
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            if not self.log_path.exists():
                self.log_path.write_text(_header_line(), encoding="utf-8")
                logger.info(f"Created store at {self.log_path}")
                return
            lines = self.log_path.read_text(encoding="utf-8").split("\n")
        except OSError as e:
            raise StoreError(f"Cannot open store {self.log_path}: {e}") from e
        try:
            header = json.loads(lines[0])
        except (json.JSONDecodeError, IndexError) as e:
            raise StoreError(f"{self.log_path}: missing header line") from e
        if header.get("format") != HEADER["format"] or header.get("version") != HEADER["version"]:
            raise StoreError(f"{self.log_path}: unsupported store header {header}")
        good_bytes = len(lines[0].encode("utf-8")) + 1
        for number, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            try:
                record = StoreRecord.model_validate_json(line)
            except ValidationError as e:
                if number == len(lines):
                    logger.warning(f"Dropping truncated final record in {self.log_path}")
                    with open(self.log_path, "r+b") as f:
                        f.truncate(good_bytes)
                    break
                raise StoreError(f"{self.log_path}:{number}: bad record: {e}") from e
            self._replay(record, number)
            good_bytes += len(line.encode("utf-8")) + 1
        logger.info(f"Loaded store: {len(self.tasks)} tasks, {len(self.programs)} programs, "
                     f"{sum(1 for _ in self.active_links())} active links")

    def _replay(self, record: StoreRecord, number: int) -> None:
        try:
            if record.kind == "task":
                p = record.payload
                task = Task.from_arc_json(p["task"], origin=p.get("origin", "synthetic"), name=p.get("name"))
                self.tasks[task.digest] = task
            elif record.kind == "program":
                program = parse_program(record.payload["text"])
                self.programs[program.digest] = program
            elif record.kind == "link":
                t, p = record.digest.split(":")
                self._link(t, p, record.payload.get("cycle", 0))
            elif record.kind == "learned":
                self._mark(record.digest, learned=True)
            elif record.kind == "unlearned":
                self._mark(record.digest, learned=False)
            elif record.kind == "pool":
                self._pool(record.digest)
        except (KeyError, ValueError, ArcLoopError) as e:
            raise StoreError(f"{self.log_path}:{number}: cannot replay {record.kind} record: {e}") from e

    def _append(self, record: StoreRecord) -> None:
        if self.directory is None:
            return
        try:
            with open(self.log_path, "a", encoding="utf-8") as f:
                f.write(_encode(record) + "\n")
        except OSError as e:
            raise StoreError(f"Cannot append to {self.log_path}: {e}") from e

    def offset(self) -> int:
        """Current log size in bytes; 0 for an in-memory store."""
        if self.directory is None:
            return 0
        return self.log_path.stat().st_size

    def truncate(self, offset: int) -> None:
        """Drop every record written after ``offset`` and rebuild the indices."""
        if self.directory is None:
            return
        with self._lock:
            try:
                with open(self.log_path, "r+b") as f:
                    f.truncate(offset)
            except OSError as e:
                raise StoreError(f"Cannot truncate {self.log_path}: {e}") from e
            self._reset()
            self._open()

    def clear(self) -> None:
        """Drop every record, keeping only the header."""
        if self.directory is None:
            with self._lock:
                self._reset()
            return
        self.truncate(len(_header_line().encode("utf-8")))

    def digest(self) -> str:
        """Content digest of the store: the log bytes, or the sorted links in memory."""
        if self.directory is not None:
            return hashlib.sha256(self.log_path.read_bytes()).hexdigest()
        text = json.dumps(sorted(self.known_links()) + sorted(self.learned), separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    # in-memory mutations shared by replay and the public API

    def _link(self, t: str, p: str, cycle: int) -> None:
        if t not in self.tasks or p not in self.programs:
            raise StoreError(f"link {t}:{p} references an unknown task or program")
        self.known[t].append(p)
        self.known_by_program[p].append(t)
        self.link_cycle[(t, p)] = cycle

    def _mark(self, t: str, learned: bool) -> None:
        if learned:
            self.learned.add(t)
            self.not_learned.discard(t)
        else:
            self.learned.discard(t)
            self.not_learned.add(t)

    def _pool(self, t: str) -> None:
        if t not in self.tasks:
            raise StoreError(f"pool entry {t} references an unknown task")
        if t not in self._pool_set:
            self._pool_set.add(t)
            self.pool.append(t)

    # public API

    def add_task(self, task: Task) -> str:
        with self._lock:
            return self._add_task(task)

    def _add_task(self, task: Task) -> str:
        digest = task.digest
        if digest not in self.tasks:
            self.tasks[digest] = task
            self._append(StoreRecord(kind="task", digest=digest, payload={
                "task": task.to_arc_json(), "origin": task.origin, "name": task.name,
            }))
        return digest

    def _add_program(self, program: Program) -> str:
        digest = program.digest
        if digest not in self.programs:
            self.programs[digest] = program
            self._append(StoreRecord(kind="program", digest=digest, payload={"text": canonical_program_text(program)}))
        return digest

    def add_to_pool(self, task: Task) -> bool:
        """Add a task to L; False if it was already there."""
        with self._lock:
            digest = self._add_task(task)
            if digest in self._pool_set:
                return False
            self._pool(digest)
            self._append(StoreRecord(kind="pool", digest=digest))
            return True

    def store_add(self, task: Task, program: Program, cycle: int = 0) -> StoreOutcome:
        """
        Link a program to a task it solves.

        Returns:
            INSERTED for a new pair, DUPLICATE for a pair offered before,
            REJECTED if the verifier says the program does not solve the task
        """
        with self._lock:
            t, p = task.digest, program.digest
            if p in self.known.get(t, ()):
                return StoreOutcome.DUPLICATE
            if self.verifier is not None and not self.verifier(program, task):
                return StoreOutcome.REJECTED
            self._add_task(task)
            self._add_program(program)
            self._link(t, p, cycle)
            self._append(StoreRecord(kind="link", digest=f"{t}:{p}", payload={"cycle": cycle}))
            return StoreOutcome.INSERTED

    def mark_learned(self, task_digest: str) -> None:
        """Remove the task's links from S."""
        with self._lock:
            self._mark(task_digest, learned=True)
            self._append(StoreRecord(kind="learned", digest=task_digest))

    def mark_unlearned(self, task_digest: str) -> None:
        """Put every known link of the task (back) into S."""
        with self._lock:
            self._mark(task_digest, learned=False)
            self._append(StoreRecord(kind="unlearned", digest=task_digest))

    # queries

    def known_links(self) -> Iterator[Link]:
        for t, programs in self.known.items():
            for p in programs:
                yield t, p

    def active_links(self) -> Iterator[Link]:
        for t, p in self.known_links():
            if t not in self.learned:
                yield t, p

    def in_store(self, task_digest: str) -> bool:
        """Whether the task has at least one link in S."""
        return bool(self.known.get(task_digest)) and task_digest not in self.learned

    def programs_for(self, task_digest: str, active: bool = True) -> List[Program]:
        if active and task_digest in self.learned:
            return []
        return [self.programs[p] for p in self.known.get(task_digest, ())]

    def tasks_for(self, program_digest: str, active: bool = True) -> List[Task]:
        return [
            self.tasks[t] for t in self.known_by_program.get(program_digest, ())
            if not (active and t in self.learned)
        ]

    def pairs(self, links: Optional[List[Link]] = None) -> List[Tuple[Task, Program]]:
        links = list(self.active_links()) if links is None else links
        return [(self.tasks[t], self.programs[p]) for t, p in links]

    def categories(self) -> Dict[str, List[str]]:
        """Pool tasks with known solutions, grouped by solution program digest."""
        groups: Dict[str, List[str]] = defaultdict(list)
        for t in self.pool:
            for p in self.known.get(t, ()):
                groups[p].append(t)
        return dict(groups)

    def tasks_first_linked_in(self, cycle: int) -> List[str]:
        """Task digests whose first link was made during ``cycle``."""
        first: Dict[str, int] = {}
        for (t, _), c in self.link_cycle.items():
            first[t] = min(c, first.get(t, c))
        return [t for t, c in first.items() if c == cycle]

    def pool_tasks(self) -> List[Task]:
        return [self.tasks[t] for t in self.pool]

    @property
    def active_count(self) -> int:
        return sum(1 for _ in self.active_links())

    def __len__(self) -> int:
        return self.active_count
