"""
Strict, deterministic tree-walking evaluator for DSL programs.
"""

import logging
from typing import Any, Optional

from models.errors import DslRuntimeError, EmptyRegion, OutOfCanvas, ProgramTypeError, RuntimeErrorKind
from models.grid import Raster, Region, region_to_raster
from dsl.builtins import BUILTINS
from dsl.program import FUNCTIONAL_INPUT, OpCall, Program, Subprogram, SymbolLeaf, AstNode
from dsl.signatures import SIGNATURES_BY_NAME
from dsl.types import type_key
from dsl.values import value_matches, value_size
from dsl.workspace import Workspace, full_template, instantiate

logger = logging.getLogger(__name__)

DEFAULT_STEP_BUDGET = 1_000_000

_UNBOUND = object()


class EvalContext:
    """Per-evaluation state: the step counter and the program being run."""

    def __init__(self, program: Program, workspace: Workspace, step_budget: int, check_types: bool):
        self.program = program
        self.workspace = workspace
        self.step_budget = step_budget
        self.check_types = check_types
        self.steps = 0

    def charge(self, n: int) -> None:
        self.steps += n
        if self.steps > self.step_budget:
            raise DslRuntimeError(
                RuntimeErrorKind.DIVERGENT_VALUE,
                f"step budget of {self.step_budget} exceeded",
            )


class Interpreter:
    """Evaluates programs against workspaces."""

    def __init__(self, step_budget: int = DEFAULT_STEP_BUDGET, check_types: bool = False):
        self.step_budget = step_budget
        self.check_types = check_types

    def evaluate(self, program: Program, workspace: Workspace) -> Any:
        """
        Evaluate a program bottom-up.

        Returns:
            The program's value

        Raises:
            DslRuntimeError: the single runtime error of this evaluation
        """
        ctx = EvalContext(program, workspace, self.step_budget, self.check_types)
        return self._eval(ctx, program.root, _UNBOUND)

    def _eval(self, ctx: EvalContext, node: AstNode, element: Any) -> Any:
        ctx.charge(1)
        if isinstance(node, SymbolLeaf):
            value = self._lookup(ctx, node, element)
        elif isinstance(node, Subprogram):
            body = node.body
            return lambda x: self._eval(ctx, body, x)
        else:
            value = self._call(ctx, node, element)
        if ctx.check_types and node.type is not None and not value_matches(value, node.type):
            raise ProgramTypeError(
                f"value {value!r} does not inhabit {type_key(node.type)}",
                str(ctx.program.index_of(node)),
            )
        return value

    def _lookup(self, ctx: EvalContext, node: SymbolLeaf, element: Any) -> Any:
        if node.key == FUNCTIONAL_INPUT:
            if element is _UNBOUND:
                raise DslRuntimeError(
                    RuntimeErrorKind.UNBOUND_SYMBOL, "FunctionalInput outside a subprogram",
                    ctx.program.index_of(node),
                )
            return element
        if node.key not in ctx.workspace:
            raise DslRuntimeError(
                RuntimeErrorKind.UNBOUND_SYMBOL, f"workspace has no key {node.key}",
                ctx.program.index_of(node),
            )
        return ctx.workspace.lookup(node.key)

    def _call(self, ctx: EvalContext, node: OpCall, element: Any) -> Any:
        impl = BUILTINS.get(node.op)
        sig = SIGNATURES_BY_NAME.get(node.op)
        if impl is None or sig is None or len(node.args) != sig.arity:
            raise DslRuntimeError(
                RuntimeErrorKind.ARITY_MISMATCH,
                f"{node.op} called with {len(node.args)} arguments",
                ctx.program.index_of(node),
            )
        args = [self._eval(ctx, arg, element) for arg in node.args]
        try:
            result = impl(ctx, *args)
        except DslRuntimeError as e:
            if e.node_index is None:
                e.node_index = ctx.program.index_of(node)
            raise
        ctx.charge(value_size(result))
        return result


def rasterize(value: Any) -> Raster:
    """Turn a program's Region result into a response raster."""
    if not isinstance(value, Region):
        raise DslRuntimeError(RuntimeErrorKind.ARITY_MISMATCH, f"program returned {type(value).__name__}, not Region")
    try:
        return region_to_raster(value)
    except EmptyRegion as e:
        raise DslRuntimeError(RuntimeErrorKind.EMPTY_REGION, str(e)) from e
    except OutOfCanvas as e:
        raise DslRuntimeError(RuntimeErrorKind.OUT_OF_CANVAS, str(e)) from e


_TEMPLATE = full_template()


def apply_program_to_raster(program: Program, raster: Raster,
                            interpreter: Optional[Interpreter] = None) -> Raster:
    """
    Run a top-level program on one input raster and rasterize the result.

    Raises:
        DslRuntimeError: from evaluation or rasterization
    """
    interpreter = interpreter or Interpreter()
    workspace = instantiate(_TEMPLATE, raster)
    return rasterize(interpreter.evaluate(program, workspace))
