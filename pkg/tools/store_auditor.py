"""
StoreAuditor tool: re-checks a task store against its own invariants.
"""

import logging
import sys
from collections import Counter
from pathlib import Path
from typing import List, Optional

sys.path.append(str(Path(__file__).parent.parent))
from models.schema import AuditReport
from tools.task_store import TaskStore
from tools.task_synthesizer import SolveMode, TaskSynthesizer

logger = logging.getLogger(__name__)


class StoreAuditor:
    """Verifies every active link and the learned/not-learned bookkeeping."""

    def __init__(self, synthesizer: Optional[TaskSynthesizer] = None):
        self.synthesizer = synthesizer or TaskSynthesizer()

    def audit(self, store: TaskStore) -> AuditReport:
        """
        Audit a store.

        Checks that each active program still solves its task in demos+tests
        mode, that no link is recorded twice, that every learned task has a
        known link and that every not-learned task is in S.
        """
        report = AuditReport()
        inconsistent: List[str] = []
        for t, p in store.active_links():
            report.links_checked += 1
            if not self.synthesizer.solves(store.programs[p], store.tasks[t], SolveMode.DEMOS_AND_TESTS):
                inconsistent.append(f"{t}:{p}")
        report.inconsistent = inconsistent

        pairs = Counter(store.known_links())
        report.duplicate_links = sum(n - 1 for n in pairs.values() if n > 1)

        report.learned_without_links = sorted(t for t in store.learned if not store.known.get(t))
        report.unlearned_missing = sorted(t for t in store.not_learned if not store.in_store(t))

        level = logging.INFO if report.ok else logging.WARNING
        logger.log(level, f"Audited {report.links_checked} links: {len(inconsistent)} inconsistent, "
                          f"{report.duplicate_links} duplicates")
        return report

    def format_report(self, report: AuditReport) -> str:
        lines = [
            f"links checked:        {report.links_checked}",
            f"inconsistent links:   {len(report.inconsistent)}",
            f"duplicate links:      {report.duplicate_links}",
            f"learned, unlinked:    {len(report.learned_without_links)}",
            f"not-learned missing:  {len(report.unlearned_missing)}",
            f"verdict:              {'OK' if report.ok else 'FAILED'}",
        ]
        for link in report.inconsistent[:20]:
            lines.append(f"  inconsistent {link}")
        return "\n".join(lines)
