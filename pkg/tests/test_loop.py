import json
import random

import pytest

from models.errors import ArcLoopError, ExplorationStalled
from models.schema import LoopConfig, ReductionRecord
from agent import ALLOWED_TRANSITIONS, LearningLoopAgent, compute_rates, cross_table
from tools.attempt_runner import AttemptRunner, WorkerPool
from tools.checkpoint_writer import CheckpointWriter, decode_rng_state, encode_rng_state
from tools.metrics_writer import METRICS_NAME
from tools.policy import UniformPolicy
from tools.store_auditor import StoreAuditor
from tools.task_synthesizer import SolveMode


def _history(metrics):
    return [row.model_dump() for row in metrics.history], [r.model_dump() for r in metrics.reductions]


def test_cycles_follow_the_phase_machine(small_config, corpus):
    agent = LearningLoopAgent(small_config)
    metrics = agent.run_cycles(corpus, 3)
    assert [row.cycle for row in metrics.history] == [0, 1, 2, 3]
    assert [r.cycle for r in metrics.reductions] == [1, 2, 3]
    assert agent.transitions[0].model_dump() == {"cycle": 0, "source": "exploration", "target": "training"}
    assert all((t.source, t.target) in ALLOWED_TRANSITIONS for t in agent.transitions)
    assert all(0.0 <= row.rate_synth <= 1.0 for row in metrics.history)


def test_store_membership_after_reductions(small_config, corpus):
    agent = LearningLoopAgent(small_config)
    agent.run_cycles(corpus, 2)
    report = StoreAuditor().audit(agent.store)
    assert report.ok
    assert all(agent.store.in_store(t) for t in agent.store.not_learned)
    assert not any(agent.store.in_store(t) for t in agent.store.learned)


def test_frozen_collection_is_kept_apart(small_config, corpus):
    agent = LearningLoopAgent(small_config)
    agent.run_cycles(corpus, 2)
    frozen = set(agent.frozen_synth)
    assert len(frozen) <= small_config.frozen_synth_size
    assert all(agent.store.tasks[t].origin == "synthetic" for t in frozen)
    for digests in agent.collections.values():
        assert frozen.isdisjoint(digests)
    assert agent.arc_eval and all(t.origin == "arc-eval" for t in agent.arc_eval)
    assert not any(t.origin == "arc-eval" for t in agent.store.pool_tasks())


def test_identical_runs_are_identical(tmp_path, small_config, corpus):
    first = LearningLoopAgent(small_config, str(tmp_path / "a"))
    second = LearningLoopAgent(small_config, str(tmp_path / "b"))
    metrics_a = first.run_cycles(corpus, 2)
    metrics_b = second.run_cycles(corpus, 2)
    assert first.store.digest() == second.store.digest()
    assert _history(metrics_a) == _history(metrics_b)
    assert metrics_a.cross_table == metrics_b.cross_table


def test_resume_matches_an_uninterrupted_run(tmp_path, small_config, corpus):
    straight = LearningLoopAgent(small_config, str(tmp_path / "straight"))
    expected = straight.run_cycles(corpus, 2)

    LearningLoopAgent(small_config, str(tmp_path / "resumed")).run_cycles(corpus, 1)
    resumed = LearningLoopAgent(small_config, str(tmp_path / "resumed"))
    metrics = resumed.run_cycles(corpus, 2)

    assert resumed.store.digest() == straight.store.digest()
    assert _history(metrics) == _history(expected)
    metrics_text = (tmp_path / "resumed" / METRICS_NAME).read_text(encoding="utf-8")
    assert metrics_text == (tmp_path / "straight" / METRICS_NAME).read_text(encoding="utf-8")


def test_interrupt_rolls_back_to_the_last_cycle(tmp_path, small_config, corpus, monkeypatch):
    straight = LearningLoopAgent(small_config, str(tmp_path / "straight"))
    expected = straight.run_cycles(corpus, 2)

    interrupted = LearningLoopAgent(small_config, str(tmp_path / "interrupted"))
    reduce = interrupted.reduction_phase

    def reduce_then_interrupt(cycle):
        result = reduce(cycle)
        if cycle == 2:
            raise KeyboardInterrupt
        return result

    monkeypatch.setattr(interrupted, "reduction_phase", reduce_then_interrupt)
    with pytest.raises(KeyboardInterrupt):
        interrupted.run_cycles(corpus, 2)
    state = CheckpointWriter(str(tmp_path / "interrupted")).read_checkpoint()
    assert state.cycle == 1
    assert interrupted.store.offset() == state.log_offset

    resumed = LearningLoopAgent(small_config, str(tmp_path / "interrupted"))
    metrics = resumed.run_cycles(corpus, 2)
    assert resumed.store.digest() == straight.store.digest()
    assert _history(metrics) == _history(expected)
    metrics_text = (tmp_path / "interrupted" / METRICS_NAME).read_text(encoding="utf-8")
    assert metrics_text == (tmp_path / "straight" / METRICS_NAME).read_text(encoding="utf-8")


def test_interrupt_before_the_first_checkpoint_empties_the_store(tmp_path, small_config, corpus, monkeypatch):
    agent = LearningLoopAgent(small_config, str(tmp_path))

    def interrupt():
        assert agent.store.tasks
        raise KeyboardInterrupt

    monkeypatch.setattr(agent, "build_frozen_collection", interrupt)
    with pytest.raises(KeyboardInterrupt):
        agent.run_cycles(corpus, 1)
    assert CheckpointWriter(str(tmp_path)).read_checkpoint() is None
    assert not agent.store.tasks


def test_run_directory_layout(tmp_path, small_config, corpus):
    agent = LearningLoopAgent(small_config, str(tmp_path))
    metrics = agent.run_cycles(corpus, 2)
    writer = CheckpointWriter(str(tmp_path))
    assert writer.snapshot_cycles() == [0, 1, 2]
    assert writer.read_checkpoint().cycle == 2
    assert writer.read_manifest().task_count == 4
    assert metrics.cross_table_rows == [1, 2]
    records = [json.loads(line) for line in (tmp_path / METRICS_NAME).read_text(encoding="utf-8").splitlines()]
    assert [r["kind"] for r in records].count("cycle") == 3
    assert [r["kind"] for r in records].count("reduction") == 2


def test_stagnation_switches_to_exploration():
    agent = LearningLoopAgent(LoopConfig(stagnation_window=2, solve_threshold=0.3))
    phases = []
    for cycle in range(4):
        agent.metrics.reductions.append(ReductionRecord(
            cycle=cycle, category_averages={}, mean=0.5, learned=0, unlearned=0, next_phase="training",
        ))
        phases.append(agent._next_phase())
    assert phases == ["training", "training", "exploration", "training"]


def test_low_solve_rate_keeps_training():
    agent = LearningLoopAgent(LoopConfig(stagnation_window=1, solve_threshold=0.3))
    for cycle in range(5):
        agent.metrics.reductions.append(ReductionRecord(
            cycle=cycle, category_averages={}, mean=0.1, learned=0, unlearned=0, next_phase="training",
        ))
        assert agent._next_phase() == "training"


def test_illegal_transition():
    agent = LearningLoopAgent(LoopConfig())
    with pytest.raises(ArcLoopError):
        agent._transition(0, "training", "exploration")


def test_exploration_needs_a_pool(small_config):
    with pytest.raises(ExplorationStalled):
        LearningLoopAgent(small_config).exploration_phase()


def test_rates_on_empty_collections(small_config):
    metrics = compute_rates(UniformPolicy(), [], [], small_config)
    assert (metrics.rate_synth, metrics.rate_arc) == (0.0, 0.0)


def test_cross_table_marks_empty_collections(small_config, identity_task):
    matrix, rows, columns = cross_table({2: UniformPolicy(), 1: UniformPolicy()}, {3: [], 0: [identity_task]},
                                        small_config)
    assert rows == [1, 2]
    assert columns == [0, 3]
    assert all(row[1] is None for row in matrix)
    assert all(0.0 <= row[0] <= 1.0 for row in matrix)


def test_more_attempts_never_solve_less(small_config, corpus):
    runner = AttemptRunner(UniformPolicy(), small_config)
    for seed in range(20):
        for task in corpus:
            if runner.solve(task, seed, SolveMode.DEMOS, attempts=1):
                assert runner.solve(task, seed, SolveMode.DEMOS, attempts=4)


def test_worker_pool_matches_inline(corpus):
    inline_cfg = LoopConfig(jobs=1, attempts_per_task=2)
    pooled_cfg = LoopConfig(jobs=2, attempts_per_task=2)
    jobs = [("solve", task, seed, SolveMode.DEMOS) for seed in range(3) for task in corpus]
    jobs += [("explore", task, seed, None) for seed in range(3) for task in corpus]

    def outcomes(cfg):
        with WorkerPool(UniformPolicy(), cfg) as pool:
            results = pool.map(jobs)
        return [
            r if isinstance(r, bool) else (
                r.program.text if r.program else None, r.solved,
                r.synthetic.digest if r.synthetic else None, r.rejection,
            )
            for r in results
        ]

    assert outcomes(inline_cfg) == outcomes(pooled_cfg)


def test_rng_state_survives_json():
    rng = random.Random(3)
    rng.random()
    state = json.loads(json.dumps(encode_rng_state(rng)))
    restored = random.Random()
    restored.setstate(decode_rng_state(state))
    assert restored.random() == rng.random()
