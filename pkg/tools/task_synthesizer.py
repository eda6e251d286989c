"""
TaskSynthesizer tool: checks programs against tasks and turns failed
programs into new synthetic tasks.
"""

import logging
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Union

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import DslRuntimeError
from models.grid import Raster
from models.task import Example, Task
from dsl.interpreter import Interpreter, apply_program_to_raster
from dsl.program import Program

logger = logging.getLogger(__name__)

Response = Union[Raster, DslRuntimeError]


class SolveMode(str, Enum):
    DEMOS = "demos"
    DEMOS_AND_TESTS = "demos+tests"


class RejectionReason(str, Enum):
    ALL_ERRORS = "AllErrors"
    TRIVIAL = "Trivial"


@dataclass(frozen=True)
class Rejection:
    reason: RejectionReason
    detail: str = ""


def nontrivial(responses: Sequence[Optional[Raster]]) -> bool:
    """
    Whether demonstration responses make a usable task.

    False if any response is missing (rasterization failed) or if there are
    at least two responses and all of them are identical. A single response
    is enough on its own.
    """
    if not responses or any(r is None for r in responses):
        return False
    if len(responses) == 1:
        return True
    first = responses[0]
    return any(r != first for r in responses[1:])


class TaskSynthesizer:
    """Tool for solve checks and synthetic task construction."""

    def __init__(self, interpreter: Optional[Interpreter] = None):
        self.interpreter = interpreter or Interpreter()

    def respond(self, program: Program, raster: Raster) -> Response:
        """The response raster, or the runtime error that prevented it."""
        try:
            return apply_program_to_raster(program, raster, self.interpreter)
        except DslRuntimeError as e:
            return e

    def solves(self, program: Program, task: Task, mode: SolveMode = SolveMode.DEMOS) -> bool:
        """
        True iff the program reproduces every required output exactly.

        Demonstrations are always checked; tests too in ``demos+tests`` mode,
        where a test without a known output counts as unsolved.
        """
        examples = list(task.demonstrations)
        if mode == SolveMode.DEMOS_AND_TESTS:
            examples += list(task.tests)
        for example in examples:
            if example.output is None:
                return False
            response = self.respond(program, example.input)
            if isinstance(response, DslRuntimeError) or response != example.output:
                return False
        return True

    def synthesize(self, program: Program, task: Task) -> Union[Task, Rejection]:
        """
        Pair the task's inputs with the program's responses.

        Returns:
            A synthetic task whose known solution is ``program``, or a
            Rejection if any response failed or the responses are trivial
        """
        demo_responses: List[Response] = [self.respond(program, d.input) for d in task.demonstrations]
        test_responses: List[Response] = [self.respond(program, t.input) for t in task.tests]
        errors = [r for r in demo_responses + test_responses if isinstance(r, DslRuntimeError)]
        if errors:
            return Rejection(RejectionReason.ALL_ERRORS, str(errors[0]))
        if not nontrivial(demo_responses):
            return Rejection(RejectionReason.TRIVIAL, "responses do not vary by demonstration")
        return Task(
            demonstrations=tuple(Example(input=d.input, output=r) for d, r in zip(task.demonstrations, demo_responses)),
            tests=tuple(Example(input=t.input, output=r) for t, r in zip(task.tests, test_responses)),
            origin="synthetic",
        )
