"""
Reader and printer for the canonical program text.

Grammar::

    node     := "(" NAME node* ")"
    NAME     := operation | symbol key | "Fn" | "FunctionalInput"

``(Fn body)`` wraps a subprogram argument; symbol keys never take arguments.
"""

from typing import Dict, List, Optional, Tuple, Union

from models.errors import ProgramParseError
from dsl.program import FN_KEYWORD, FUNCTIONAL_INPUT, AstNode, OpCall, Program, Subprogram, SymbolLeaf
from dsl.signatures import SIGNATURES_BY_NAME
from dsl.typecheck import typecheck_program
from dsl.types import TypeExpr
from dsl.workspace import RESERVED_NAMES, WorkspaceTemplate, full_template

# (name, name position, children)
_Form = Tuple[str, int, List["_Form"]]


def _skip_whitespace(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _read_token(text: str, i: int) -> Tuple[str, int]:
    start = i
    while i < len(text) and not text[i].isspace() and text[i] not in "()":
        i += 1
    return text[start:i], i


def _read_form(text: str, i: int) -> Tuple[_Form, int]:
    i = _skip_whitespace(text, i)
    if i >= len(text):
        raise ProgramParseError("unexpected end of input", i)
    if text[i] != "(":
        raise ProgramParseError(f"expected '(' but found {text[i]!r}", i)
    i = _skip_whitespace(text, i + 1)
    name_pos = i
    name, i = _read_token(text, i)
    if not name:
        raise ProgramParseError("missing operation or symbol name", name_pos)
    kids: List[_Form] = []
    while True:
        i = _skip_whitespace(text, i)
        if i >= len(text):
            raise ProgramParseError("unclosed parenthesis", i)
        if text[i] == ")":
            return (name, name_pos, kids), i + 1
        child, i = _read_form(text, i)
        kids.append(child)


def _build(form: _Form) -> AstNode:
    name, pos, kids = form
    if name == FN_KEYWORD:
        if len(kids) != 1:
            raise ProgramParseError("Fn takes exactly one body", pos)
        return Subprogram(_build(kids[0]))
    if name in SIGNATURES_BY_NAME:
        return OpCall(name, tuple(_build(k) for k in kids))
    if name in RESERVED_NAMES:
        if kids:
            raise ProgramParseError(f"symbol {name} takes no arguments", pos)
        return SymbolLeaf(name)
    raise ProgramParseError(f"unknown name {name!r}", pos)


def read_tree(text: str) -> AstNode:
    """Parse text into an untyped tree."""
    form, end = _read_form(text, 0)
    end = _skip_whitespace(text, end)
    if end != len(text):
        raise ProgramParseError("trailing text after program", end)
    return _build(form)


def parse_program(text: str, template: Optional[WorkspaceTemplate] = None) -> Program:
    """
    Parse and type-check a top-level program.

    Raises:
        ProgramParseError: malformed text, with position
        ProgramTypeError: ill-typed program, with node path
    """
    template = template or full_template()
    symbols: Dict[str, TypeExpr] = dict(template.symbols())
    return typecheck_program(Program(read_tree(text)), symbols)


def canonical_program_text(program: Union[Program, AstNode]) -> str:
    """The text ``parse_program`` reads back to an equal program; stored and printed as is."""
    return program.text if isinstance(program, Program) else Program(program).text
