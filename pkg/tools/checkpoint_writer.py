"""
CheckpointWriter tool: the run directory's manifest, checkpoint and policy snapshots.

Layout of a run directory::

    manifest.json            run manifest (config echo, seed, corpus digest)
    checkpoint.json          state after the last completed cycle
    policy.json              policy at the last checkpoint
    policy-cycle-<n>.json    policy snapshot taken at the end of cycle n
    metrics.jsonl            metric records, one per line
    store/store.log          the task store
"""

import logging
import os
import random
import sys
from pathlib import Path
from typing import Any, List, Optional

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import StoreError
from models.schema import CheckpointState, RunManifest
from tools.policy import Policy

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
CHECKPOINT_NAME = "checkpoint.json"
POLICY_NAME = "policy.json"


def encode_rng_state(rng: random.Random) -> List[Any]:
    version, internal, gauss = rng.getstate()
    return [version, list(internal), gauss]


def decode_rng_state(state: List[Any]) -> tuple:
    version, internal, gauss = state
    return version, tuple(internal), gauss


class CheckpointWriter:
    """Tool for writing and reading the files of one run directory."""

    def __init__(self, run_dir: str):
        self.run_dir = Path(run_dir)

    @property
    def store_dir(self) -> Path:
        return self.run_dir / "store"

    def policy_path(self, cycle: Optional[int] = None) -> Path:
        return self.run_dir / (POLICY_NAME if cycle is None else f"policy-cycle-{cycle}.json")

    def _write_json(self, path: Path, text: str) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(path.suffix + ".tmp")
            tmp.write_text(text, encoding="utf-8")
            os.replace(tmp, path)
        except OSError as e:
            raise StoreError(f"Cannot write {path}: {e}") from e

    def write_manifest(self, manifest: RunManifest) -> None:
        self._write_json(self.run_dir / MANIFEST_NAME, manifest.model_dump_json(indent=2))

    def read_manifest(self) -> Optional[RunManifest]:
        path = self.run_dir / MANIFEST_NAME
        if not path.exists():
            return None
        return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))

    def write_policy(self, policy: Policy, cycle: Optional[int] = None) -> Path:
        path = self.policy_path(cycle)
        self._write_json(path, policy.snapshot().model_dump_json(indent=1))
        return path

    def read_policy(self, cycle: Optional[int] = None) -> Policy:
        return Policy.load(str(self.policy_path(cycle)))

    def snapshot_cycles(self) -> List[int]:
        """Cycles with a saved policy snapshot, ascending."""
        cycles = []
        for path in self.run_dir.glob("policy-cycle-*.json"):
            try:
                cycles.append(int(path.stem.rsplit("-", 1)[1]))
            except ValueError:
                continue
        return sorted(cycles)

    def write_checkpoint(self, state: CheckpointState, policy: Policy) -> None:
        """
        Persist the state after a completed cycle.

        The policy is written before the checkpoint file so a checkpoint never
        points at a policy that is not on disk.
        """
        self.write_policy(policy)
        self._write_json(self.run_dir / CHECKPOINT_NAME, state.model_dump_json())
        logger.info(f"Checkpoint written: cycle {state.cycle}, next phase {state.phase}")

    def read_checkpoint(self) -> Optional[CheckpointState]:
        path = self.run_dir / CHECKPOINT_NAME
        if not path.exists():
            return None
        try:
            return CheckpointState.model_validate_json(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise StoreError(f"Unreadable checkpoint {path}: {e}") from e
