"""
Policy tools that score generation candidates.

A policy sees the context of a typed hole and the candidates that fit it and
returns one non-negative weight per candidate. Training feeds it solved
(task, program) pairs; the counting policy remembers which choices those
programs made at which contexts.
"""

import hashlib
import json
import logging
import sys
from abc import ABC, abstractmethod
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import ArcLoopError
from models.schema import CountEntry, PolicySnapshot
from models.task import Task
from dsl.frontier import GenContext, trace_decisions
from dsl.program import Program
from dsl.signatures import Candidate

logger = logging.getLogger(__name__)

CountKey = Tuple[str, int, str, str]


class Policy(ABC):
    """Scores candidates for a hole; learns from solved pairs."""

    kind = "uniform"

    @abstractmethod
    def score(self, context: GenContext, candidates: Sequence[Candidate]) -> List[float]:
        """One non-negative weight per candidate, not all zero."""

    def observe(self, context: GenContext, name: str) -> None:
        """Record that a solution chose ``name`` at ``context``."""

    def update(self, batch: Iterable[Tuple[Task, Program]]) -> "Policy":
        """
        Learn from solved pairs by replaying each program's decisions.

        Args:
            batch: (task, program) pairs drawn from the store

        Returns:
            self, updated in place
        """
        seen = 0
        for _task, program in batch:
            for context, name in trace_decisions(program):
                self.observe(context, name)
            seen += 1
        if seen:
            logger.debug(f"Policy updated on {seen} programs")
        return self

    @abstractmethod
    def snapshot(self) -> PolicySnapshot:
        ...

    @abstractmethod
    def restore(self, snapshot: PolicySnapshot) -> None:
        ...

    def save(self, path: str) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.snapshot().model_dump_json(indent=1), encoding="utf-8")

    @staticmethod
    def load(path: str) -> "Policy":
        try:
            snapshot = PolicySnapshot.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise ArcLoopError(f"Cannot read policy snapshot {path}: {e}") from e
        return policy_from_snapshot(snapshot)


class UniformPolicy(Policy):
    """Every candidate weighs the same; never learns."""

    def score(self, context: GenContext, candidates: Sequence[Candidate]) -> List[float]:
        return [1.0] * len(candidates)

    def snapshot(self) -> PolicySnapshot:
        return PolicySnapshot(kind="uniform")

    def restore(self, snapshot: PolicySnapshot) -> None:
        pass


class CountingPolicy(Policy):
    """
    Smoothed choice counts keyed on (parent op, child index, required type, candidate).

    The weight of a candidate is its count plus ``alpha``, so contexts never
    seen fall back to uniform and no candidate is ever starved.
    """

    kind = "counting"

    def __init__(self, alpha: float = 1.0):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = alpha
        self.counts: Dict[CountKey, float] = defaultdict(float)

    def score(self, context: GenContext, candidates: Sequence[Candidate]) -> List[float]:
        prefix = (context.parent, context.child_index, context.type_key)
        return [self.counts.get(prefix + (c.name,), 0.0) + self.alpha for c in candidates]

    def observe(self, context: GenContext, name: str) -> None:
        self.counts[(context.parent, context.child_index, context.type_key, name)] += 1.0

    def total(self) -> float:
        return sum(self.counts.values())

    def snapshot(self) -> PolicySnapshot:
        entries = [
            CountEntry(parent=p, child_index=i, type_key=t, name=n, count=c)
            for (p, i, t, n), c in sorted(self.counts.items())
        ]
        return PolicySnapshot(kind="counting", alpha=self.alpha, counts=entries)

    def restore(self, snapshot: PolicySnapshot) -> None:
        self.alpha = snapshot.alpha
        self.counts = defaultdict(float)
        for e in snapshot.counts:
            self.counts[(e.parent, e.child_index, e.type_key, e.name)] = e.count


def policy_from_snapshot(snapshot: PolicySnapshot) -> Policy:
    policy: Policy = CountingPolicy(snapshot.alpha) if snapshot.kind == "counting" else UniformPolicy()
    policy.restore(snapshot)
    return policy


def policy_update(policy: Policy, batch: Iterable[Tuple[Task, Program]]) -> Policy:
    return policy.update(batch)


def snapshot_digest(policy: Policy) -> str:
    """Short fingerprint of a policy's state, for logs and manifests."""
    text = json.dumps(policy.snapshot().model_dump(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
