"""
AttemptRunner tool: the generate-and-check work the loop fans out.

Each job carries its own seed, drawn in order by the orchestrator, so results
do not depend on which worker runs a job or in what order jobs finish.
"""

import logging
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import GenerationDeadEnd
from models.schema import LoopConfig, PolicySnapshot
from models.task import Task
from dsl.interpreter import Interpreter
from dsl.program import Program
from dsl.workspace import build_template
from tools.policy import Policy, policy_from_snapshot
from tools.program_generator import ProgramGenerator
from tools.task_synthesizer import Rejection, SolveMode, TaskSynthesizer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExplorationOutcome:
    program: Optional[Program]
    solved: bool
    synthetic: Optional[Task] = None
    rejection: Optional[str] = None


# ("explore", task, seed, None) or ("solve", task, seed, mode)
Job = Tuple[str, Task, int, Optional[SolveMode]]


class AttemptRunner:
    """Samples programs for tasks with a fixed policy and checks them."""

    def __init__(self, policy: Policy, config: LoopConfig):
        self.policy = policy
        self.config = config
        self.synthesizer = TaskSynthesizer(Interpreter(step_budget=config.generation.step_budget))
        self._generators: Dict[Tuple[str, ...], ProgramGenerator] = {}

    def generator_for(self, task: Task) -> ProgramGenerator:
        template = build_template(task)
        key = tuple(template.names)
        if key not in self._generators:
            self._generators[key] = ProgramGenerator(template, self.policy, self.config.generation)
        return self._generators[key]

    def sample(self, task: Task, rng: random.Random) -> Optional[Program]:
        try:
            return self.generator_for(task).generate(rng)
        except GenerationDeadEnd as e:
            logger.debug(f"Generation dead end on {task.label}: {e}")
            return None

    def explore(self, task: Task, seed: int) -> ExplorationOutcome:
        """Generate one program for ``task``; synthesize a new task if it fails."""
        program = self.sample(task, random.Random(seed))
        if program is None:
            return ExplorationOutcome(None, False, rejection="DeadEnd")
        if self.synthesizer.solves(program, task, SolveMode.DEMOS):
            return ExplorationOutcome(program, True)
        result = self.synthesizer.synthesize(program, task)
        if isinstance(result, Rejection):
            return ExplorationOutcome(program, False, rejection=result.reason.value)
        return ExplorationOutcome(program, False, synthetic=result)

    def solve(self, task: Task, seed: int, mode: SolveMode = SolveMode.DEMOS,
              attempts: Optional[int] = None) -> bool:
        """
        True if any of ``attempts`` generated programs solves the task.

        Attempts are drawn from one stream per seed, so a larger budget only
        adds attempts after the ones a smaller budget makes.
        """
        rng = random.Random(seed)
        for _ in range(attempts or self.config.attempts_per_task):
            program = self.sample(task, rng)
            if program is not None and self.synthesizer.solves(program, task, mode):
                return True
        return False

    def run(self, job: Job):
        kind, task, seed, mode = job
        if kind == "explore":
            return self.explore(task, seed)
        return self.solve(task, seed, mode or SolveMode.DEMOS)


_RUNNER: Optional[AttemptRunner] = None


def _init_worker(snapshot: PolicySnapshot, config: LoopConfig) -> None:
    global _RUNNER
    _RUNNER = AttemptRunner(policy_from_snapshot(snapshot), config)


def _run_job(job: Job):
    return _RUNNER.run(job)


class WorkerPool:
    """Runs jobs inline for ``jobs == 1``, otherwise on a process pool."""

    def __init__(self, policy: Policy, config: LoopConfig):
        self.jobs = config.jobs
        self.executor: Optional[ProcessPoolExecutor] = None
        self.runner: Optional[AttemptRunner] = None
        if self.jobs > 1:
            self.executor = ProcessPoolExecutor(
                max_workers=self.jobs, initializer=_init_worker, initargs=(policy.snapshot(), config),
            )
        else:
            self.runner = AttemptRunner(policy, config)

    def map(self, jobs: Sequence[Job]) -> List:
        """Results in job order."""
        if self.executor is None:
            return [self.runner.run(job) for job in jobs]
        chunk = max(1, len(jobs) // (self.jobs * 4))
        return list(self.executor.map(_run_job, jobs, chunksize=chunk))

    def close(self) -> None:
        if self.executor is not None:
            self.executor.shutdown(cancel_futures=True)
            self.executor = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
