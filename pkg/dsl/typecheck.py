"""
Independent type checker for program trees.

It re-derives every node type from scratch with fresh instantiations and
unification, so it can audit the generator as well as admit parsed text.
"""

from typing import Dict, Optional, Tuple

from models.errors import ProgramTypeError, UnificationFailure
from dsl.program import FUNCTIONAL_INPUT, AstNode, OpCall, Program, Subprogram, SymbolLeaf
from dsl.signatures import SIGNATURES_BY_NAME, OpSignature, expand_unions, instantiate
from dsl.types import EMPTY, REGION, FunctionOf, Substitution, TypeExpr, resolve, type_key, unify


def _unify(expected: TypeExpr, actual: TypeExpr, s: Substitution, path: str) -> Substitution:
    try:
        return unify(expected, actual, s)
    except UnificationFailure as e:
        raise ProgramTypeError(
            f"expected {type_key(expected, s)}, found {type_key(actual, s)} ({e})", path
        ) from e


class TypeChecker:
    """Infers and checks node types against a symbol table."""

    def __init__(self, symbols: Dict[str, TypeExpr]):
        self.symbols = symbols

    def check(self, root: AstNode, expected: Optional[TypeExpr] = REGION,
              input_type: Optional[TypeExpr] = None) -> AstNode:
        """
        Type-check a tree and return a copy annotated with resolved types.

        Raises:
            ProgramTypeError: with the path of the offending node
        """
        node, t, s = self._infer(root, EMPTY, input_type, "0")
        if expected is not None:
            s = _unify(expected, t, s, "0")
        return _annotate(node, s)

    def _infer(self, node: AstNode, s: Substitution, input_type: Optional[TypeExpr],
               path: str) -> Tuple[AstNode, TypeExpr, Substitution]:
        if isinstance(node, SymbolLeaf):
            if node.key == FUNCTIONAL_INPUT:
                if input_type is None:
                    raise ProgramTypeError("FunctionalInput used outside a subprogram", path)
                return SymbolLeaf(node.key, input_type), input_type, s
            if node.key not in self.symbols:
                raise ProgramTypeError(f"unknown symbol {node.key}", path)
            t = self.symbols[node.key]
            return SymbolLeaf(node.key, t), t, s
        if isinstance(node, Subprogram):
            raise ProgramTypeError("subprogram in a non-function position", path)
        sig = SIGNATURES_BY_NAME.get(node.op)
        if sig is None:
            raise ProgramTypeError(f"unknown operation {node.op}", path)
        if len(node.args) != sig.arity:
            raise ProgramTypeError(f"{node.op} takes {sig.arity} arguments, got {len(node.args)}", path)
        error: Optional[ProgramTypeError] = None
        for branch in expand_unions(sig):
            try:
                return self._check_call(node, instantiate(branch), s, input_type, path)
            except ProgramTypeError as e:
                error = e
        raise error

    def _check_call(self, node: OpCall, sig: OpSignature, s: Substitution,
                    input_type: Optional[TypeExpr], path: str) -> Tuple[AstNode, TypeExpr, Substitution]:
        args = list(node.args)
        checked = [None] * len(args)
        # plain arguments first so subprogram input types are known
        for i, (arg, param) in enumerate(zip(args, sig.params)):
            if isinstance(param, FunctionOf):
                continue
            if isinstance(arg, Subprogram):
                raise ProgramTypeError(f"{node.op} argument {i} cannot be a subprogram", f"{path}.{i}")
            checked[i], t, s = self._infer(arg, s, input_type, f"{path}.{i}")
            s = _unify(param, t, s, f"{path}.{i}")
        for i, (arg, param) in enumerate(zip(args, sig.params)):
            if not isinstance(param, FunctionOf):
                continue
            if not isinstance(arg, Subprogram):
                raise ProgramTypeError(f"{node.op} argument {i} must be a subprogram", f"{path}.{i}")
            body, t, s = self._infer(arg.body, s, param.arg, f"{path}.{i}.0")
            s = _unify(param.ret, t, s, f"{path}.{i}.0")
            checked[i] = Subprogram(body, input_type=param.arg, type=param)
        return OpCall(node.op, tuple(checked), type=sig.ret, variant=sig.variant), sig.ret, s


def _annotate(node: AstNode, s: Substitution) -> AstNode:
    if isinstance(node, SymbolLeaf):
        return SymbolLeaf(node.key, resolve(node.type, s))
    if isinstance(node, Subprogram):
        return Subprogram(_annotate(node.body, s), resolve(node.input_type, s), resolve(node.type, s))
    return OpCall(node.op, tuple(_annotate(a, s) for a in node.args), resolve(node.type, s), node.variant)


def typecheck_program(program: Program, symbols: Dict[str, TypeExpr]) -> Program:
    """Check a top-level program (root type Region) and return it annotated."""
    return Program(TypeChecker(symbols).check(program.root, REGION))
