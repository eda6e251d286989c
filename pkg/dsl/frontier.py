"""
Breadth-first frontier of typed holes.

The generator and the decision replay share this queue discipline so that a
stored program is walked in exactly the order it would have been generated:
holes of one (sub)program first-in first-out, then the subprogram bodies that
program opened, last-in first-out.
"""

from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Sequence, Tuple

from models.errors import ProgramTypeError, UnificationFailure
from dsl.program import FUNCTIONAL_INPUT, ROOT_PARENT, OpCall, Program, Subprogram, SymbolLeaf
from dsl.signatures import branch_for, instantiate
from dsl.types import EMPTY, REGION, FunctionOf, Substitution, TypeExpr, resolve, type_key, unify
from dsl.workspace import full_template


@dataclass(frozen=True)
class GenContext:
    """Features of the hole being filled, as seen by the policy."""
    current_size: int
    depth: int
    parent: str
    child_index: int
    required_type: TypeExpr
    type_key: str
    nesting_level: int
    # minimal nodes still owed to the other open holes of this program
    reserved: int = 0
    input_type: Optional[TypeExpr] = None


@dataclass(frozen=True)
class Hole:
    slot: int
    goal: TypeExpr
    parent: str
    child_index: int
    depth: int
    program: int


@dataclass(frozen=True)
class PendingBody:
    body_slot: int
    fn_type: FunctionOf
    parent: str
    child_index: int
    level: int


@dataclass(frozen=True)
class ProgramFrame:
    level: int
    input_type: Optional[TypeExpr]
    nodes: int = 0


class Frontier:
    """Open holes plus deferred subprogram bodies; cheap to copy for backtracking."""

    __slots__ = ("queue", "deferred", "frames", "next_slot")

    def __init__(self, queue: List[Hole], deferred: List[PendingBody],
                 frames: List[ProgramFrame], next_slot: int):
        self.queue = queue
        self.deferred = deferred
        self.frames = frames
        self.next_slot = next_slot

    @classmethod
    def initial(cls, goal: TypeExpr = REGION) -> "Frontier":
        return cls([Hole(0, goal, ROOT_PARENT, 0, 1, 0)], [], [ProgramFrame(0, None)], 1)

    def copy(self) -> "Frontier":
        return Frontier(list(self.queue), list(self.deferred), list(self.frames), self.next_slot)

    def advance(self) -> Optional[Hole]:
        """The next hole to fill, opening a deferred body when the current program is done."""
        if not self.queue and self.deferred:
            body = self.deferred.pop()
            program = len(self.frames)
            self.frames.append(ProgramFrame(body.level, body.fn_type.arg))
            self.queue.append(Hole(body.body_slot, body.fn_type.ret, body.parent, body.child_index, 1, program))
        return self.queue[0] if self.queue else None

    def frame(self, hole: Hole) -> ProgramFrame:
        return self.frames[hole.program]

    def context(self, hole: Hole, s: Substitution, reserved: int = 0) -> GenContext:
        frame = self.frame(hole)
        return GenContext(
            current_size=frame.nodes,
            depth=hole.depth,
            parent=hole.parent,
            child_index=hole.child_index,
            required_type=resolve(hole.goal, s),
            type_key=type_key(hole.goal, s),
            nesting_level=frame.level,
            reserved=reserved,
            input_type=resolve(frame.input_type, s) if frame.input_type is not None else None,
        )

    def fill(self, hole: Hole, name: str, params: Sequence[TypeExpr]) -> List[int]:
        """
        Fill the head hole with ``name`` and open one child per parameter.

        Function-typed parameters become a Subprogram node plus a deferred body.

        Returns:
            The slot of each child; for a function parameter, the slot of its body
        """
        if not self.queue or self.queue[0] != hole:
            raise ValueError("only the head of the frontier can be filled")
        self.queue.pop(0)
        frame = self.frames[hole.program]
        child_slots = []
        subprograms = 0
        for i, param in enumerate(params):
            slot = self.next_slot
            self.next_slot += 1
            child_slots.append(slot)
            if isinstance(param, FunctionOf):
                subprograms += 1
                self.deferred.append(PendingBody(slot, param, name, i, frame.level + 1))
            else:
                self.queue.append(Hole(slot, param, name, i, hole.depth + 1, hole.program))
        self.frames[hole.program] = replace(frame, nodes=frame.nodes + 1 + subprograms)
        return child_slots


_SYMBOL_TYPES = dict(full_template().symbols())


def trace_decisions(program: Program) -> Iterator[Tuple[GenContext, str]]:
    """
    Replay the choices that build ``program``, in generation order.

    Yields:
        (context at the hole, chosen operation or symbol name)

    Raises:
        ProgramTypeError: if the program cannot be rebuilt hole by hole
    """
    frontier = Frontier.initial(REGION)
    s = EMPTY
    nodes = {0: program.root}
    while (hole := frontier.advance()) is not None:
        node = nodes.pop(hole.slot)
        ctx = frontier.context(hole, s)
        try:
            if isinstance(node, SymbolLeaf):
                if node.key == FUNCTIONAL_INPUT:
                    t = frontier.frame(hole).input_type
                else:
                    t = _SYMBOL_TYPES[node.key]
                s = unify(t, hole.goal, s)
                yield ctx, node.key
                frontier.fill(hole, node.key, ())
                continue
            if isinstance(node, Subprogram):
                raise ProgramTypeError("subprogram outside a function position", str(hole.slot))
            sig = instantiate(branch_for(node.op, node.variant))
            s = unify(sig.ret, hole.goal, s)
        except (UnificationFailure, KeyError) as e:
            raise ProgramTypeError(f"cannot replay {program.text}: {e}", str(hole.slot)) from e
        yield ctx, node.op
        for slot, arg in zip(frontier.fill(hole, node.op, sig.params), node.args):
            nodes[slot] = arg.body if isinstance(arg, Subprogram) else arg
