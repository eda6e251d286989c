import json

import pytest

from models.errors import StoreError
from dsl.text import canonical_program_text, parse_program
from tools.store_auditor import StoreAuditor
from tools.task_store import LOG_NAME, StoreOutcome, TaskStore
from tools.task_synthesizer import SolveMode, TaskSynthesizer

IDENTITY = parse_program("(Scene)")
FLIP_TWICE = parse_program("(Flip (Flip (Scene) (Vertical)) (Vertical))")
PAINT_RED = parse_program("(Paint (Scene) (Red))")


def _verifier():
    synthesizer = TaskSynthesizer()
    return lambda program, task: synthesizer.solves(program, task, SolveMode.DEMOS_AND_TESTS)


def test_insert_and_duplicate(identity_task):
    store = TaskStore()
    assert store.store_add(identity_task, IDENTITY) is StoreOutcome.INSERTED
    assert store.store_add(identity_task, IDENTITY) is StoreOutcome.DUPLICATE
    assert len(store) == 1
    assert store.in_store(identity_task.digest)


def test_many_to_many(identity_task, corpus):
    copy_task = next(t for t in corpus if t.name == "copy")
    store = TaskStore()
    store.store_add(identity_task, IDENTITY)
    store.store_add(identity_task, FLIP_TWICE)
    store.store_add(copy_task, IDENTITY)
    assert store.programs_for(identity_task.digest) == [IDENTITY, FLIP_TWICE]
    assert {t.name for t in store.tasks_for(IDENTITY.digest)} == {"identity", "copy"}
    assert len(store.pairs()) == 3


def test_verifier_rejects(identity_task):
    store = TaskStore(verifier=_verifier())
    assert store.store_add(identity_task, PAINT_RED) is StoreOutcome.REJECTED
    assert len(store) == 0
    assert identity_task.digest not in store.tasks


def test_learned_marks_move_tasks_out_of_s(identity_task):
    store = TaskStore()
    store.store_add(identity_task, IDENTITY)
    store.mark_learned(identity_task.digest)
    assert not store.in_store(identity_task.digest)
    assert store.active_count == 0
    assert store.programs_for(identity_task.digest) == []
    assert store.programs_for(identity_task.digest, active=False) == [IDENTITY]
    assert store.store_add(identity_task, IDENTITY) is StoreOutcome.DUPLICATE
    store.mark_unlearned(identity_task.digest)
    assert store.in_store(identity_task.digest)


def test_categories_group_pool_tasks_by_solution(identity_task, corpus):
    copy_task = next(t for t in corpus if t.name == "copy")
    store = TaskStore()
    store.add_to_pool(identity_task)
    store.add_to_pool(copy_task)
    assert not store.add_to_pool(copy_task)
    store.store_add(identity_task, IDENTITY)
    store.store_add(copy_task, IDENTITY)
    store.store_add(copy_task, FLIP_TWICE)
    categories = store.categories()
    assert categories[IDENTITY.digest] == [identity_task.digest, copy_task.digest]
    assert categories[FLIP_TWICE.digest] == [copy_task.digest]


def test_first_link_cycle(identity_task, corpus):
    copy_task = next(t for t in corpus if t.name == "copy")
    store = TaskStore()
    store.store_add(identity_task, IDENTITY, cycle=0)
    store.store_add(identity_task, FLIP_TWICE, cycle=2)
    store.store_add(copy_task, IDENTITY, cycle=2)
    assert store.tasks_first_linked_in(0) == [identity_task.digest]
    assert store.tasks_first_linked_in(2) == [copy_task.digest]


# persistence

def test_reopen_replays_the_log(tmp_path, identity_task, corpus):
    store = TaskStore(str(tmp_path))
    store.add_to_pool(identity_task)
    store.store_add(identity_task, IDENTITY)
    store.store_add(corpus[0], FLIP_TWICE, cycle=1)
    store.mark_learned(corpus[0].digest)
    reopened = TaskStore(str(tmp_path))
    assert sorted(reopened.known_links()) == sorted(store.known_links())
    assert reopened.learned == {corpus[0].digest}
    assert reopened.pool == [identity_task.digest]
    assert reopened.link_cycle == store.link_cycle
    assert reopened.digest() == store.digest()
    assert reopened.tasks[identity_task.digest].name == "identity"


def test_log_keeps_canonical_program_text(tmp_path, identity_task):
    store = TaskStore(str(tmp_path))
    store.store_add(identity_task, FLIP_TWICE)
    records = [json.loads(line) for line in (tmp_path / LOG_NAME).read_text(encoding="utf-8").splitlines()[1:]]
    texts = [r["payload"]["text"] for r in records if r["kind"] == "program"]
    assert texts == [canonical_program_text(FLIP_TWICE)]
    assert parse_program(texts[0]) == FLIP_TWICE


def test_torn_final_record_is_dropped(tmp_path, identity_task):
    store = TaskStore(str(tmp_path))
    store.store_add(identity_task, IDENTITY)
    good = store.offset()
    with open(tmp_path / LOG_NAME, "a", encoding="utf-8") as f:
        f.write('{"kind":"link","dig')
    reopened = TaskStore(str(tmp_path))
    assert reopened.offset() == good
    assert reopened.in_store(identity_task.digest)
    reopened.mark_learned(identity_task.digest)
    assert TaskStore(str(tmp_path)).learned == {identity_task.digest}


def test_corrupt_middle_record(tmp_path, identity_task):
    store = TaskStore(str(tmp_path))
    store.store_add(identity_task, IDENTITY)
    log = tmp_path / LOG_NAME
    lines = log.read_text(encoding="utf-8").splitlines()
    lines.insert(1, "garbage")
    log.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(StoreError):
        TaskStore(str(tmp_path))


def test_bad_header(tmp_path):
    (tmp_path / LOG_NAME).write_text('{"format":"other","version":1}\n', encoding="utf-8")
    with pytest.raises(StoreError):
        TaskStore(str(tmp_path))


def test_truncate_and_clear(tmp_path, identity_task, corpus):
    store = TaskStore(str(tmp_path))
    store.store_add(identity_task, IDENTITY)
    offset = store.offset()
    store.store_add(corpus[0], FLIP_TWICE)
    store.truncate(offset)
    assert list(store.known_links()) == [(identity_task.digest, IDENTITY.digest)]
    store.clear()
    assert len(store) == 0
    assert not store.tasks
    assert len(TaskStore(str(tmp_path)).tasks) == 0


# audit

def test_audit_passes_on_verified_store(identity_task, paint_red_task):
    store = TaskStore(verifier=_verifier())
    store.store_add(identity_task, IDENTITY)
    store.store_add(paint_red_task, PAINT_RED)
    store.mark_learned(paint_red_task.digest)
    report = StoreAuditor().audit(store)
    assert report.ok
    assert report.links_checked == 1


def test_audit_flags_inconsistent_links(identity_task):
    store = TaskStore()
    store.store_add(identity_task, PAINT_RED)
    report = StoreAuditor().audit(store)
    assert not report.ok
    assert report.inconsistent == [f"{identity_task.digest}:{PAINT_RED.digest}"]
    assert "FAILED" in StoreAuditor().format_report(report)


def test_audit_flags_unlearned_task_outside_s(identity_task):
    store = TaskStore()
    store.mark_unlearned(identity_task.digest)
    report = StoreAuditor().audit(store)
    assert report.unlearned_missing == [identity_task.digest]


def test_audit_flags_learned_task_without_links(identity_task, paint_red_task):
    store = TaskStore()
    store.store_add(identity_task, IDENTITY)
    store.mark_learned(paint_red_task.digest)
    report = StoreAuditor().audit(store)
    assert not report.ok
    assert report.learned_without_links == [paint_red_task.digest]
    assert "learned, unlinked:    1" in StoreAuditor().format_report(report)
