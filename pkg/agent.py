"""
Main agent orchestrator for arcloop: the exploration, training and reduction loop.
"""

import argparse
import hashlib
import json
import logging
import random
import statistics
import sys
from collections import Counter, defaultdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple

sys.path.append(str(Path(__file__).parent))

from models.errors import (
    ArcLoopError, ConfigError, DslRuntimeError, ExplorationStalled, MalformedTask,
    ProgramParseError, ProgramTypeError, StoreError,
)
from models.grid import Raster
from models.schema import (
    CheckpointState, CycleRecord, LoopConfig, Metrics, Phase, ReductionRecord, RunManifest, Transition,
)
from models.task import Task
from dsl.interpreter import Interpreter
from dsl.signatures import signature_table
from dsl.text import canonical_program_text, parse_program
from tools.attempt_runner import ExplorationOutcome, Job, WorkerPool
from tools.checkpoint_writer import CheckpointWriter, decode_rng_state, encode_rng_state
from tools.config_loader import ConfigLoader
from tools.metrics_writer import MetricsWriter
from tools.policy import CountingPolicy, Policy, policy_update, snapshot_digest
from tools.renderer import Renderer
from tools.store_auditor import StoreAuditor
from tools.task_provider import TaskProvider
from tools.task_store import LOG_NAME, StoreOutcome, TaskStore
from tools.task_synthesizer import SolveMode, TaskSynthesizer

logger = logging.getLogger(__name__)

# edges of the phase state machine
ALLOWED_TRANSITIONS = {
    ("exploration", "training"),
    ("training", "reduction"),
    ("reduction", "exploration"),
    ("reduction", "training"),
}

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _solve_rate(pool: WorkerPool, tasks: Sequence[Task], mode: SolveMode, rng: random.Random) -> float:
    if not tasks:
        return 0.0
    jobs: List[Job] = [("solve", t, rng.getrandbits(64), mode) for t in tasks]
    return sum(pool.map(jobs)) / len(tasks)


def compute_rates(policy: Policy, frozen_synth: Sequence[Task], arc_eval: Sequence[Task],
                  cfg: LoopConfig, rng: Optional[random.Random] = None) -> Metrics:
    """
    RateSynth and RateARC for a policy.

    A task counts as solved if any of ``cfg.attempts_per_task`` generated
    programs reproduces its demonstrations and tests.
    """
    rng = rng or random.Random(cfg.rng_seed)
    with WorkerPool(policy, cfg) as pool:
        synth = _solve_rate(pool, frozen_synth, SolveMode.DEMOS_AND_TESTS, rng)
        arc = _solve_rate(pool, arc_eval, SolveMode.DEMOS_AND_TESTS, rng)
    return Metrics(rate_synth=synth, rate_arc=arc)


def cross_table(snapshots: Dict[int, Policy], per_cycle_collections: Dict[int, Sequence[Task]],
                cfg: LoopConfig, rng: Optional[random.Random] = None) -> Tuple[List[List[Optional[float]]], List[int], List[int]]:
    """
    Solve rate of every policy snapshot on every cycle's collection.

    Returns:
        (matrix, row cycles, column cycles); empty collections give None
    """
    rng = rng or random.Random(cfg.rng_seed)
    rows = sorted(snapshots)
    columns = sorted(per_cycle_collections)
    matrix: List[List[Optional[float]]] = []
    for r in rows:
        with WorkerPool(snapshots[r], cfg) as pool:
            matrix.append([
                _solve_rate(pool, per_cycle_collections[c], SolveMode.DEMOS_AND_TESTS, rng)
                if per_cycle_collections[c] else None
                for c in columns
            ])
    return matrix, rows, columns


def corpus_digest(tasks: Sequence[Task]) -> str:
    return hashlib.sha256("\n".join(t.digest for t in tasks).encode("utf-8")).hexdigest()


class LearningLoopAgent:
    """Runs exploration, training and reduction over a task pool L and store S."""

    def __init__(self, config: LoopConfig, run_dir: Optional[str] = None, policy: Optional[Policy] = None):
        self.config = config
        self.rng = random.Random(config.rng_seed)
        self.policy = policy or CountingPolicy(config.counting_alpha)
        self.synthesizer = TaskSynthesizer(Interpreter(step_budget=config.generation.step_budget))
        self.checkpoints = CheckpointWriter(run_dir) if run_dir else None
        store_dir = str(self.checkpoints.store_dir) if self.checkpoints else None
        self.store = TaskStore(store_dir, verifier=self._verify)
        self.metrics_writer = MetricsWriter(run_dir)
        self.metrics = Metrics()
        self.transitions: List[Transition] = []
        self.phase: Phase = "exploration"
        self.cycle = 0
        self.best_window_mean: Optional[float] = None
        self.stagnant_reductions = 0
        self.collections: Dict[int, List[str]] = {}
        self.frozen_synth: List[str] = []
        self.arc_eval: List[Task] = []

    def _verify(self, program, task: Task) -> bool:
        return self.synthesizer.solves(program, task, SolveMode.DEMOS_AND_TESTS)

    # corpus

    def load_corpus(self, tasks: Sequence[Task]) -> None:
        """ARC training tasks seed L; evaluation tasks are kept for RateARC."""
        self.arc_eval = [t for t in tasks if t.origin == "arc-eval"]
        added = sum(self.store.add_to_pool(t) for t in tasks if t.origin != "arc-eval")
        logger.info(f"Pool holds {len(self.store.pool)} tasks ({added} new); {len(self.arc_eval)} evaluation tasks")

    @property
    def _frozen(self) -> Set[str]:
        return set(self.frozen_synth)

    def _pool_digests(self) -> List[str]:
        frozen = self._frozen
        return [t for t in self.store.pool if t not in frozen]

    # phases

    def exploration_phase(self, cycle: int = 0) -> Tuple[int, int]:
        """
        Grow S by generating programs for random tasks from L.

        Solved tasks are linked to their program. Failed programs become
        synthetic tasks that are linked to the program and added to L.

        Returns:
            (new tasks in S, new distinct programs)

        Raises:
            ExplorationStalled: if the iteration cap is reached first
        """
        cfg = self.config
        programs_before = set(self.store.programs)
        new_tasks: Set[str] = set()
        new_programs: Set[str] = set()
        rejections: Counter = Counter()
        iterations = 0

        def done() -> bool:
            return (len(new_tasks) >= cfg.exploration_min_tasks
                    and len(new_programs) >= cfg.exploration_min_unique_solutions)

        logger.info(f"Exploration (cycle {cycle}): pool {len(self.store.pool)}, store {self.store.active_count}")
        with WorkerPool(self.policy, cfg) as pool:
            while not done():
                if iterations >= cfg.max_exploration_iterations:
                    raise ExplorationStalled(
                        f"{iterations} iterations gave {len(new_tasks)} new tasks and "
                        f"{len(new_programs)} new programs"
                    )
                size = min(cfg.jobs * 8, cfg.max_exploration_iterations - iterations)
                candidates = self._pool_digests()
                if not candidates:
                    raise ExplorationStalled("the task pool is empty")
                jobs: List[Job] = [
                    ("explore", self.store.tasks[self.rng.choice(candidates)], self.rng.getrandbits(64), None)
                    for _ in range(size)
                ]
                for job, outcome in zip(jobs, pool.map(jobs)):
                    iterations += 1
                    self._record_exploration(job[1], outcome, cycle, programs_before,
                                             new_tasks, new_programs, rejections)
                    if done():
                        break
        logger.info(f"Exploration done after {iterations} iterations: {len(new_tasks)} new tasks, "
                    f"{len(new_programs)} new programs")
        logger.debug(f"Exploration rejections: {dict(rejections)}")
        return len(new_tasks), len(new_programs)

    def _record_exploration(self, task: Task, outcome: ExplorationOutcome, cycle: int,
                            programs_before: Set[str], new_tasks: Set[str], new_programs: Set[str],
                            rejections: Counter) -> None:
        program = outcome.program
        if program is None or (not outcome.solved and outcome.synthetic is None):
            rejections[outcome.rejection] += 1
            return
        target = task if outcome.solved else outcome.synthetic
        result = self.store.store_add(target, program, cycle)
        if result == StoreOutcome.REJECTED and outcome.solved:
            # demonstrations pass, tests do not
            synthetic = self.synthesizer.synthesize(program, task)
            if not isinstance(synthetic, Task):
                rejections[synthetic.reason.value] += 1
                return
            target = synthetic
            result = self.store.store_add(target, program, cycle)
        if result != StoreOutcome.INSERTED:
            rejections[result.value] += 1
            return
        if target.origin == "synthetic":
            self.store.add_to_pool(target)
        if self.store.in_store(target.digest):
            new_tasks.add(target.digest)
        if program.digest not in programs_before:
            new_programs.add(program.digest)

    def training_phase(self) -> Policy:
        """Update the policy once on a random subset of the links in S."""
        frozen = self._frozen
        links = [link for link in self.store.active_links() if link[0] not in frozen]
        size = min(len(links), self.config.training_subset)
        if size == 0:
            logger.info("Training skipped: no links in the store")
            return self.policy
        subset = self.rng.sample(links, size)
        policy_update(self.policy, self.store.pairs(subset))
        logger.info(f"Training on {size} links; policy {snapshot_digest(self.policy)}")
        return self.policy

    def reduction_phase(self, cycle: int = 0) -> Phase:
        """
        Re-test categories of pool tasks that share a known solution.

        Solved tasks are marked learned and leave S; failed ones are put back
        into S. Returns the phase to run next.
        """
        cfg = self.config
        frozen = self._frozen
        categories = {
            p: [t for t in members if t not in frozen]
            for p, members in self.store.categories().items()
        }
        categories = {p: members for p, members in categories.items() if members}
        names = list(categories)
        if len(names) < cfg.reduction_categories:
            logger.warning(f"DegenerateCategories: {len(names)} categories available, "
                           f"{cfg.reduction_categories} requested; using all")
            chosen = names
        else:
            chosen = self.rng.sample(names, cfg.reduction_categories)

        jobs: List[Job] = []
        owners: List[Tuple[str, str]] = []
        for category in chosen:
            members = categories[category]
            k = cfg.tasks_per_category
            picks = self.rng.sample(members, k) if len(members) >= k else self.rng.choices(members, k=k)
            for t in picks:
                jobs.append(("solve", self.store.tasks[t], self.rng.getrandbits(64), SolveMode.DEMOS))
                owners.append((category, t))

        with WorkerPool(self.policy, cfg) as pool:
            results = pool.map(jobs)

        by_category: Dict[str, List[bool]] = defaultdict(list)
        by_task: Dict[str, bool] = {}
        for (category, t), solved in zip(owners, results):
            by_category[category].append(solved)
            by_task[t] = by_task.get(t, True) and solved

        learned = failed = 0
        for t, solved in by_task.items():
            if solved:
                learned += 1
                if t not in self.store.learned:
                    self.store.mark_learned(t)
            else:
                failed += 1
                if t in self.store.learned or t not in self.store.not_learned:
                    self.store.mark_unlearned(t)

        averages = {c: sum(v) / len(v) for c, v in by_category.items()}
        mean = statistics.fmean(averages.values()) if averages else 0.0
        sample_rate = self.store_sample_rate(cfg.store_sample_size)
        record = ReductionRecord(
            cycle=cycle, category_averages=averages, mean=mean, learned=learned,
            unlearned=failed, sample_rate=sample_rate, next_phase="training",
        )
        self.metrics.reductions.append(record)
        record.next_phase = self._next_phase()
        self.metrics_writer.append(record)
        logger.info(f"Reduction (cycle {cycle}): {len(averages)} categories, mean {mean:.2%}, "
                    f"{learned} learned, {failed} failed, next {record.next_phase}")
        return record.next_phase

    def _next_phase(self) -> Phase:
        """
        Exploration once the windowed mean is above the threshold and has not
        improved for ``stagnation_window`` reductions; Training otherwise.
        """
        window = self.config.stagnation_window
        window_mean = statistics.fmean(r.mean for r in self.metrics.reductions[-window:])
        if self.best_window_mean is None or window_mean > self.best_window_mean:
            self.best_window_mean = window_mean
            self.stagnant_reductions = 0
        else:
            self.stagnant_reductions += 1
        if window_mean > self.config.solve_threshold and self.stagnant_reductions >= window:
            self.best_window_mean = None
            self.stagnant_reductions = 0
            return "exploration"
        return "training"

    def store_sample_rate(self, sample_size: int) -> Optional[float]:
        """Share of distinct tasks in a random sample of S the policy solves; None if S is empty."""
        links = list(self.store.active_links())
        size = min(len(links), sample_size)
        if size == 0:
            return None
        tasks = list(dict.fromkeys(t for t, _ in self.rng.sample(links, size)))
        with WorkerPool(self.policy, self.config) as pool:
            return _solve_rate(pool, [self.store.tasks[t] for t in tasks], SolveMode.DEMOS, self.rng)

    # metrics

    def frozen_tasks(self) -> List[Task]:
        return [self.store.tasks[t] for t in self.frozen_synth]

    def build_frozen_collection(self) -> None:
        """Fix the RateSynth collection from the synthetic tasks currently in S."""
        synthetic = [t for t, task in self.store.tasks.items()
                     if task.origin == "synthetic" and self.store.in_store(t)]
        size = self.config.frozen_synth_size
        self.frozen_synth = synthetic if len(synthetic) <= size else self.rng.sample(synthetic, size)
        logger.info(f"Frozen synthetic collection: {len(self.frozen_synth)} tasks")

    def compute_rates(self) -> Metrics:
        return compute_rates(self.policy, self.frozen_tasks(), self.arc_eval, self.config, self.rng)

    def _record_cycle(self, cycle: int) -> CycleRecord:
        rates = self.compute_rates()
        row = CycleRecord(
            cycle=cycle, rate_synth=rates.rate_synth, rate_arc=rates.rate_arc,
            store_links=self.store.active_count, pool_size=len(self.store.pool),
        )
        self.metrics.history.append(row)
        self.metrics.rate_synth, self.metrics.rate_arc = row.rate_synth, row.rate_arc
        self.metrics_writer.append(row)
        frozen = self._frozen
        self.collections[cycle] = [
            t for t in self.store.tasks_first_linked_in(cycle)
            if self.store.tasks[t].origin == "synthetic" and t not in frozen
        ]
        logger.info(f"Cycle {cycle}: RateSynth {row.rate_synth:.2%}, RateARC {row.rate_arc:.2%}")
        return row

    def _transition(self, cycle: int, source: Phase, target: Phase) -> None:
        if (source, target) not in ALLOWED_TRANSITIONS:
            raise ArcLoopError(f"illegal phase transition {source} -> {target}")
        self.transitions.append(Transition(cycle=cycle, source=source, target=target))
        logger.debug(f"cycle {cycle}: {source} -> {target}")

    # checkpoints

    def _state(self) -> CheckpointState:
        return CheckpointState(
            cycle=self.cycle, phase=self.phase, log_offset=self.store.offset(),
            rng_state=encode_rng_state(self.rng), transitions=self.transitions, metrics=self.metrics,
            best_window_mean=self.best_window_mean, stagnant_reductions=self.stagnant_reductions,
            collections={str(c): v for c, v in self.collections.items()}, frozen_synth=self.frozen_synth,
        )

    def checkpoint(self) -> None:
        if self.checkpoints is None:
            return
        self.checkpoints.write_policy(self.policy, self.cycle)
        self.checkpoints.write_checkpoint(self._state(), self.policy)

    def checkpoint_on_interrupt(self) -> None:
        """
        Roll back to the last completed cycle and write its checkpoint again.

        Store records and metric lines from the unfinished cycle are dropped,
        so resuming replays that cycle exactly. Before the first checkpoint
        the store is emptied instead.
        """
        if self.checkpoints is None:
            return
        if self.resume():
            self.checkpoint()
            logger.warning(f"Interrupted; checkpoint written for cycle {self.cycle}")
        else:
            self.store.clear()
            logger.warning("Interrupted before the first checkpoint; the store was emptied")

    def resume(self) -> bool:
        """Restore the last checkpoint, dropping store records written after it."""
        state = self.checkpoints.read_checkpoint() if self.checkpoints else None
        if state is None:
            return False
        self.store.truncate(state.log_offset)
        self.rng.setstate(decode_rng_state(state.rng_state))
        self.policy = self.checkpoints.read_policy()
        self.cycle, self.phase = state.cycle, state.phase
        self.transitions = list(state.transitions)
        self.metrics = state.metrics
        self.best_window_mean = state.best_window_mean
        self.stagnant_reductions = state.stagnant_reductions
        self.collections = {int(c): v for c, v in state.collections.items()}
        self.frozen_synth = list(state.frozen_synth)
        self.metrics_writer.rewrite(self.metrics)
        logger.info(f"Resumed after cycle {self.cycle}; next phase {self.phase}")
        return True

    def _write_manifest(self, tasks: Sequence[Task]) -> None:
        if self.checkpoints is None:
            return
        digest = corpus_digest(tasks)
        existing = self.checkpoints.read_manifest()
        if existing is not None and existing.corpus_digest != digest:
            raise StoreError("the ARC corpus differs from the one this run started with")
        if existing is not None and existing.config != self.config:
            logger.warning("Config differs from the run manifest; resuming with the new config")
        if existing is None:
            self.checkpoints.write_manifest(RunManifest(
                config=self.config, seed=self.config.rng_seed, corpus_digest=digest,
                task_count=len(tasks) - len(self.arc_eval), eval_task_count=len(self.arc_eval),
                created=datetime.now(timezone.utc).isoformat(),
            ))

    # cycles

    def _bootstrap(self) -> None:
        """Initial exploration, the frozen collection and the untrained baseline row."""
        try:
            self.exploration_phase(0)
        except ExplorationStalled as e:
            logger.warning(f"Initial exploration stalled: {e}")
        self.build_frozen_collection()
        self._record_cycle(0)
        self._transition(0, "exploration", "training")
        self.phase = "training"
        self.checkpoint()

    def run_cycle(self, cycle: int) -> None:
        if self.phase == "exploration":
            try:
                self.exploration_phase(cycle)
            except ExplorationStalled as e:
                logger.warning(f"Exploration stalled: {e}")
            self._transition(cycle, "exploration", "training")
        self.training_phase()
        self._transition(cycle, "training", "reduction")
        next_phase = self.reduction_phase(cycle)
        self._transition(cycle, "reduction", next_phase)
        self.phase = next_phase
        self._record_cycle(cycle)
        self.cycle = cycle
        self.checkpoint()

    def run_cycles(self, tasks: Sequence[Task], n_cycles: int) -> Metrics:
        """
        Run the loop for ``n_cycles`` cycles, resuming from a checkpoint if one exists.

        A cycle is an optional exploration, one training and one reduction.
        Before the first cycle the initial exploration runs and the baseline
        row (cycle 0) is recorded with the untrained policy.

        Returns:
            Metrics with the per-cycle history and the snapshot-by-collection table
        """
        if not self.resume():
            self.store.clear()
            self.metrics_writer.rewrite(self.metrics)
        self.load_corpus(tasks)
        self._write_manifest(tasks)
        try:
            if not self.metrics.history:
                self._bootstrap()
            for cycle in range(self.cycle + 1, n_cycles + 1):
                self.run_cycle(cycle)
        except KeyboardInterrupt:
            self.checkpoint_on_interrupt()
            raise
        self.fill_cross_table(n_cycles)
        return self.metrics

    def snapshots(self, up_to: int) -> Dict[int, Policy]:
        if self.checkpoints is None:
            return {self.cycle: self.policy} if self.cycle else {}
        return {c: self.checkpoints.read_policy(c) for c in self.checkpoints.snapshot_cycles() if 1 <= c <= up_to}

    def fill_cross_table(self, up_to: int) -> None:
        collections = {
            c: [self.store.tasks[t] for t in digests]
            for c, digests in self.collections.items() if c <= up_to and digests
        }
        matrix, rows, columns = cross_table(self.snapshots(up_to), collections, self.config,
                                            random.Random(self.config.rng_seed))
        self.metrics.cross_table = matrix
        self.metrics.cross_table_rows = rows
        self.metrics.cross_table_columns = columns


# command line

def _load_tasks(path: str) -> List[Task]:
    return TaskProvider().ingest(path)


def _open_store(store_dir: str) -> TaskStore:
    directory = CheckpointWriter(store_dir).store_dir
    if not (directory / LOG_NAME).exists():
        raise StoreError(f"no store under {store_dir}")
    return TaskStore(str(directory))


def _emit(args, text: str, data=None) -> None:
    if args.format == "json" and data is not None:
        print(json.dumps(data, indent=2))
    else:
        print(text)


def cmd_ingest(args, config: LoopConfig) -> int:
    provider = TaskProvider()
    tasks = provider.ingest(args.path)
    manifest = provider.manifest
    lines = [f"loaded {manifest.count} tasks from {manifest.root}", f"skipped {len(manifest.failures)} files"]
    lines += [f"  {f.filename}: {f.message}" for f in manifest.failures]
    lines.append(f"corpus digest {corpus_digest(tasks)}")
    _emit(args, "\n".join(lines), manifest.model_dump())
    return EXIT_OK


def cmd_explore(args, config: LoopConfig) -> int:
    agent = LearningLoopAgent(config, args.store_dir)
    if args.policy:
        agent.policy = Policy.load(args.policy)
    agent.load_corpus(_load_tasks(args.arc))
    new_tasks, new_programs = agent.exploration_phase(0)
    _emit(args, f"new tasks: {new_tasks}\nnew programs: {new_programs}\nstore links: {agent.store.active_count}",
          {"new_tasks": new_tasks, "new_programs": new_programs, "store_links": agent.store.active_count})
    return EXIT_OK


def cmd_run(args, config: LoopConfig) -> int:
    agent = LearningLoopAgent(config, args.store_dir)
    metrics = agent.run_cycles(_load_tasks(args.arc), args.cycles)
    writer = agent.metrics_writer
    text = "\n\n".join([writer.format_table(metrics), writer.format_reductions(metrics),
                        writer.format_cross_table(metrics)])
    _emit(args, text, metrics.model_dump())
    return EXIT_OK


def cmd_eval(args, config: LoopConfig) -> int:
    agent = LearningLoopAgent(config, args.store_dir)
    if not agent.resume():
        raise StoreError(f"no checkpoint under {args.store_dir}")
    if args.arc:
        tasks = _load_tasks(args.arc)
        agent.arc_eval = [t for t in tasks if t.origin == "arc-eval"] or tasks
    writer = agent.metrics_writer
    if args.cross_table:
        agent.fill_cross_table(agent.cycle)
        _emit(args, writer.format_cross_table(agent.metrics), {
            "rows": agent.metrics.cross_table_rows, "columns": agent.metrics.cross_table_columns,
            "matrix": agent.metrics.cross_table,
        })
        return EXIT_OK
    rates = agent.compute_rates()
    _emit(args, f"RateSynth {rates.rate_synth:.2%} on {len(agent.frozen_synth)} tasks\n"
                f"RateARC   {rates.rate_arc:.2%} on {len(agent.arc_eval)} tasks",
          {"rate_synth": rates.rate_synth, "rate_arc": rates.rate_arc})
    return EXIT_OK


def cmd_exec(args, config: LoopConfig) -> int:
    program = parse_program(args.program)
    target = TaskProvider().load_any(args.path)
    synthesizer = TaskSynthesizer(Interpreter(config.generation.step_budget, check_types=args.check_types))
    renderer = Renderer()
    show = args.format == "ansi"
    if isinstance(target, Raster):
        response = synthesizer.respond(program, target)
        if isinstance(response, DslRuntimeError):
            print(f"error: {response}")
            return EXIT_NEGATIVE
        print(renderer.ansi_raster(response) if show else json.dumps(response.to_grid()))
        return EXIT_OK

    mode = SolveMode(args.mode)
    examples = [("demo", i, e) for i, e in enumerate(target.demonstrations, start=1)]
    if mode == SolveMode.DEMOS_AND_TESTS:
        examples += [("test", i, e) for i, e in enumerate(target.tests, start=1)]
    verdicts = []
    for kind, i, example in examples:
        response = synthesizer.respond(program, example.input)
        if isinstance(response, DslRuntimeError):
            ok, note = False, str(response)
        elif example.output is None:
            ok, note = False, "no expected output"
        else:
            ok, note = response == example.output, ""
        verdicts.append({"example": f"{kind} {i}", "solved": ok, "note": note})
        if args.format != "json":
            print(f"{kind} {i}: {'OK' if ok else 'FAIL'}" + (f" ({note})" if note else ""))
            if show and isinstance(response, Raster):
                print(renderer.ansi_raster(response))
    solved = synthesizer.solves(program, target, mode)
    if args.format == "json":
        print(json.dumps({"program": canonical_program_text(program), "verdicts": verdicts, "solved": solved}, indent=2))
    else:
        print("SOLVED" if solved else "NOT SOLVED")
    return EXIT_OK if solved else EXIT_NEGATIVE


def cmd_audit(args, config: LoopConfig) -> int:
    store = _open_store(args.store_dir)
    auditor = StoreAuditor(TaskSynthesizer(Interpreter(config.generation.step_budget)))
    report = auditor.audit(store)
    _emit(args, auditor.format_report(report), report.model_dump())
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_render(args, config: LoopConfig) -> int:
    target = TaskProvider().load_any(args.path)
    fmt = "ppm" if args.format == "ppm" else "ansi"
    data = Renderer().render(target, fmt)
    if args.output:
        try:
            Path(args.output).write_bytes(data)
        except OSError as e:
            raise StoreError(f"Cannot write {args.output}: {e}") from e
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


def cmd_export_dsl(args, config: LoopConfig) -> int:
    table = signature_table()
    if args.format == "json":
        print(json.dumps(table, indent=2))
    else:
        for row in table:
            print(f"{row['name']:<12} ({', '.join(row['params'])}) -> {row['ret']}  [{row['category']}]")
    return EXIT_OK


def cmd_samples(args, config: LoopConfig) -> int:
    store = _open_store(args.store_dir)
    renderer = Renderer()
    listing = []
    for t, p in list(store.active_links())[:args.limit]:
        task, program = store.tasks[t], store.programs[p]
        listing.append({"task": t, "origin": task.origin, "program": canonical_program_text(program)})
        if args.format != "json":
            print(f"task {task.label} ({task.origin})")
            print(f"program {canonical_program_text(program)}")
            if args.format == "ansi":
                print(renderer.ansi_task(task))
            print()
    if args.format == "json":
        print(json.dumps(listing, indent=2))
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "explore": cmd_explore,
    "run": cmd_run,
    "eval": cmd_eval,
    "exec": cmd_exec,
    "audit": cmd_audit,
    "render": cmd_render,
    "export-dsl": cmd_export_dsl,
    "samples": cmd_samples,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Random seed (rng_seed)")
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--store-dir", default="runs/default", help="Run directory holding the store (default: runs/default)")
    common.add_argument("--jobs", type=int, help="Worker processes")
    common.add_argument("--attempts", type=int, help="Generated programs per task when evaluating")
    common.add_argument("--format", choices=["text", "json", "ansi", "ppm"], default="text", help="Output format")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="arcloop",
        description="Typed grid DSL, program generator and learning-from-mistakes loop for ARC",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  arcloop ingest data/training
  arcloop run --arc data --cycles 5 --store-dir runs/seed0 --seed 0
  arcloop exec "(Paint (Scene) (Red))" data/training/0a938d79.json --format ansi
  arcloop render data/training/0a938d79.json --format ppm --output task.ppm
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="Parse an ARC directory and report a manifest")
    p.add_argument("path", help="ARC root or split directory")

    p = sub.add_parser("explore", parents=[common], help="Run one exploration phase into the store")
    p.add_argument("--arc", required=True, help="ARC root or training directory")
    p.add_argument("--policy", help="Policy snapshot to generate with")

    p = sub.add_parser("run", parents=[common], help="Run (or resume) learning cycles")
    p.add_argument("--arc", required=True, help="ARC root (training/ and evaluation/) or training directory")
    p.add_argument("--cycles", type=int, default=5, help="Cycles to run (default: 5)")

    p = sub.add_parser("eval", parents=[common], help="RateSynth/RateARC for the latest checkpoint")
    p.add_argument("--arc", help="Evaluation tasks (ARC root or evaluation directory)")
    p.add_argument("--cross-table", action="store_true", help="Snapshot-by-collection table instead")

    p = sub.add_parser("exec", parents=[common], help="Apply program text to a task or raster file")
    p.add_argument("program", help="Canonical program text")
    p.add_argument("path", help="ARC task JSON or bare grid JSON")
    p.add_argument("--mode", choices=[m.value for m in SolveMode], default=SolveMode.DEMOS.value)
    p.add_argument("--check-types", action="store_true", help="Check every node's value against its type")

    p = sub.add_parser("audit", parents=[common], help="Check store self-consistency")

    p = sub.add_parser("render", parents=[common], help="Render a task or raster as ANSI or PPM")
    p.add_argument("path", help="ARC task JSON or bare grid JSON")
    p.add_argument("--output", help="File to write instead of stdout")

    sub.add_parser("export-dsl", parents=[common], help="Print the operation signature table")

    p = sub.add_parser("samples", parents=[common], help="List stored (task, program) pairs")
    p.add_argument("--limit", type=int, default=10, help="Pairs to list (default: 10)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point for arcloop."""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)

    try:
        config = ConfigLoader().load(args.config, {
            "rng_seed": args.seed, "attempts_per_task": args.attempts, "jobs": args.jobs,
        })
        code = COMMANDS[args.command](args, config)
    except (ProgramParseError, ProgramTypeError, ConfigError, MalformedTask) as e:
        print(f"Error: {e}", file=sys.stderr)
        code = EXIT_USAGE
    except (StoreError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        code = EXIT_IO
    except KeyboardInterrupt:
        print("Interrupted; the run directory holds the last completed cycle and can be resumed", file=sys.stderr)
        code = 130
    except ArcLoopError as e:
        print(f"Error: {e}", file=sys.stderr)
        code = EXIT_NEGATIVE
    sys.exit(code)


if __name__ == "__main__":
    main()
