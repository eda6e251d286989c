"""
The 40 DSL operation signatures and type-directed candidate selection.
"""

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from models.errors import NoCandidates, UnificationFailure
from dsl.types import (
    ARITHMETIC, BOOL, COLOR, COMPARABLE, CONNECTIVITY, DIRECTION, INT, LOC, ORIENTATION, REGION,
    FunctionOf, ListOf, PairOf, Substitution, TypeExpr, UnionOf, Var, iter_vars, rename_vars, unify,
)

DATA_COMPOSING = "data-composing"
PROPERTY_RETRIEVING = "property-retrieving"
STRUCTURE_MANIPULATING = "structure-manipulating"
ARITHMETIC_OPS = "arithmetic"
REGION_SPECIFIC = "region-specific"
HIGHER_ORDER = "higher-order"


@dataclass(frozen=True)
class OpSignature:
    name: str
    params: Tuple[TypeExpr, ...]
    ret: TypeExpr
    category: str
    description: str = ""
    # set on monomorphic branches of union-typed signatures, e.g. "Pair[Int, Int]"
    variant: Optional[str] = None

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def is_higher_order(self) -> bool:
        return self.category == HIGHER_ORDER

    def function_params(self) -> List[int]:
        return [i for i, p in enumerate(self.params) if isinstance(p, FunctionOf)]


def _sig(name, params, ret, category, description) -> OpSignature:
    return OpSignature(name=name, params=tuple(params), ret=ret, category=category, description=description)


def _build_table() -> Tuple[OpSignature, ...]:
    # template variables; every use goes through instantiate()
    A, B = Var(-1), Var(-2)
    AR = Var(-3, ARITHMETIC)
    BC = Var(-4, COMPARABLE)
    int_or_bool = UnionOf((INT, BOOL))
    return (
        _sig("Add", [AR, AR], AR, ARITHMETIC_OPS, "Adds two objects of the same arithmetic type"),
        _sig("Area", [REGION], INT, PROPERTY_RETRIEVING, "Number of pixels of a region"),
        _sig("Crop", [REGION, LOC, LOC], REGION, REGION_SPECIFIC, "Cuts the subregion between two corners"),
        _sig("Deduplicate", [ListOf(A)], ListOf(A), STRUCTURE_MANIPULATING, "Removes duplicates from a list"),
        _sig("Diff", [ListOf(A), ListOf(A)], ListOf(A), STRUCTURE_MANIPULATING, "List difference"),
        _sig("Draw", [REGION, UnionOf((REGION, ListOf(REGION)))], REGION, REGION_SPECIFIC,
             "Overlays a region or list of regions on a region"),
        _sig("Equals", [A, A], BOOL, PROPERTY_RETRIEVING, "Structural equality"),
        _sig("Filter", [ListOf(A), FunctionOf(A, BOOL)], ListOf(A), HIGHER_ORDER,
             "Keeps elements for which the subprogram is true"),
        _sig("First", [PairOf(A, B)], A, STRUCTURE_MANIPULATING, "First element of a pair"),
        _sig("Flip", [REGION, ORIENTATION], REGION, REGION_SPECIFIC, "Mirrors a region within its bounding box"),
        _sig("FloodFill", [REGION, COLOR, CONNECTIVITY], ListOf(REGION), REGION_SPECIFIC,
             "Connected components of non-background pixels"),
        _sig("GroupBy", [ListOf(A), FunctionOf(A, B)], ListOf(PairOf(B, ListOf(A))), HIGHER_ORDER,
             "Groups elements by the subprogram result"),
        _sig("Head", [ListOf(A)], A, STRUCTURE_MANIPULATING, "First element of a list"),
        _sig("Height", [REGION], INT, PROPERTY_RETRIEVING, "Bounding-box height"),
        _sig("Intersection", [ListOf(A), ListOf(A)], ListOf(A), STRUCTURE_MANIPULATING, "List intersection"),
        _sig("LBC", [REGION], LOC, PROPERTY_RETRIEVING, "Left bottom corner"),
        _sig("LTC", [REGION], LOC, PROPERTY_RETRIEVING, "Left top corner"),
        _sig("Len", [ListOf(A)], INT, PROPERTY_RETRIEVING, "Length of a list"),
        _sig("Line", [LOC, LOC, COLOR], REGION, DATA_COMPOSING, "Single-color line between two points"),
        _sig("Loc", [INT, INT], LOC, DATA_COMPOSING, "Location constructor"),
        _sig("Map", [ListOf(A), FunctionOf(A, B)], ListOf(B), HIGHER_ORDER,
             "Applies the subprogram to each element"),
        _sig("MostCommon", [ListOf(A), FunctionOf(A, BC)], BC, HIGHER_ORDER,
             "Most frequent subprogram result"),
        _sig("Neg", [int_or_bool], int_or_bool, ARITHMETIC_OPS, "Negates an integer or boolean"),
        _sig("Paint", [REGION, COLOR], REGION, REGION_SPECIFIC, "Colors a region with a solid color"),
        _sig("Pair", [A, B], PairOf(A, B), DATA_COMPOSING, "Pair constructor"),
        _sig("Pixels", [REGION], ListOf(REGION), REGION_SPECIFIC, "Single-pixel regions of a region"),
        _sig("RBC", [REGION], LOC, PROPERTY_RETRIEVING, "Right bottom corner"),
        _sig("RTC", [REGION], LOC, PROPERTY_RETRIEVING, "Right top corner"),
        _sig("Rect", [LOC, LOC, COLOR], REGION, DATA_COMPOSING, "Filled single-color rectangle"),
        _sig("Reverse", [ListOf(A)], ListOf(A), STRUCTURE_MANIPULATING, "Reverses a list"),
        _sig("Rotate", [REGION, DIRECTION], REGION, REGION_SPECIFIC, "Rotates a region within its bounding box"),
        _sig("Scale", [REGION, UnionOf((INT, PairOf(INT, INT)))], REGION, REGION_SPECIFIC,
             "Block-upscales a region"),
        _sig("Second", [PairOf(A, B)], B, STRUCTURE_MANIPULATING, "Second element of a pair"),
        _sig("Shift", [REGION, UnionOf((LOC, PairOf(INT, INT)))], REGION, REGION_SPECIFIC,
             "Translates a region"),
        _sig("Sort", [ListOf(A), FunctionOf(A, BC)], ListOf(A), HIGHER_ORDER,
             "Stable ascending sort by subprogram result"),
        _sig("Sub", [AR, AR], AR, ARITHMETIC_OPS, "Subtracts two objects of the same arithmetic type"),
        _sig("Tail", [ListOf(A)], A, STRUCTURE_MANIPULATING, "Last element of a list"),
        _sig("Union", [ListOf(A), ListOf(A)], ListOf(A), STRUCTURE_MANIPULATING, "List concatenation"),
        _sig("Width", [REGION], INT, PROPERTY_RETRIEVING, "Bounding-box width"),
        _sig("Zip", [ListOf(A), ListOf(B)], ListOf(PairOf(A, B)), DATA_COMPOSING,
             "Pairs corresponding elements, truncating to the shorter list"),
    )


SIGNATURES: Tuple[OpSignature, ...] = _build_table()
SIGNATURES_BY_NAME: Dict[str, OpSignature] = {sig.name: sig for sig in SIGNATURES}
HIGHER_ORDER_OPS = frozenset(sig.name for sig in SIGNATURES if sig.is_higher_order)


def instantiate(sig: OpSignature) -> OpSignature:
    """Copy of ``sig`` with every type variable replaced by a fresh one."""
    mapping: Dict[int, Var] = {}
    params = tuple(rename_vars(p, mapping) for p in sig.params)
    return replace(sig, params=params, ret=rename_vars(sig.ret, mapping))


def _replace_union(t: TypeExpr, union: UnionOf, member: TypeExpr) -> TypeExpr:
    if t == union:
        return member
    if isinstance(t, ListOf):
        return ListOf(_replace_union(t.elem, union, member))
    if isinstance(t, PairOf):
        return PairOf(_replace_union(t.first, union, member), _replace_union(t.second, union, member))
    if isinstance(t, FunctionOf):
        return FunctionOf(_replace_union(t.arg, union, member), _replace_union(t.ret, union, member))
    return t


def _unions_in(t: TypeExpr, found: List[UnionOf]) -> None:
    if isinstance(t, UnionOf):
        if t not in found:
            found.append(t)
    elif isinstance(t, ListOf):
        _unions_in(t.elem, found)
    elif isinstance(t, PairOf):
        _unions_in(t.first, found)
        _unions_in(t.second, found)
    elif isinstance(t, FunctionOf):
        _unions_in(t.arg, found)
        _unions_in(t.ret, found)


def expand_unions(sig: OpSignature) -> List[OpSignature]:
    """
    Monomorphic branches of a signature.

    Equal unions are resolved together, so Neg stays Int->Int or Bool->Bool.
    Signatures without unions come back as a single-element list.
    """
    unions: List[UnionOf] = []
    for t in sig.params + (sig.ret,):
        _unions_in(t, unions)
    if not unions:
        return [sig]
    branches = []
    for choice in itertools.product(*(u.members for u in unions)):
        params, ret = sig.params, sig.ret
        for union, member in zip(unions, choice):
            params = tuple(_replace_union(p, union, member) for p in params)
            ret = _replace_union(ret, union, member)
        variant = ", ".join(str(m) for m in choice)
        branches.append(replace(sig, params=params, ret=ret, variant=variant))
    return branches


BRANCHES: Tuple[OpSignature, ...] = tuple(b for sig in SIGNATURES for b in expand_unions(sig))
BRANCH_COUNTS: Dict[str, int] = {sig.name: len(expand_unions(sig)) for sig in SIGNATURES}


def branch_for(name: str, variant: Optional[str] = None) -> OpSignature:
    """The branch of ``name`` with the given variant (the first branch when unspecified)."""
    for branch in BRANCHES:
        if branch.name == name and (variant is None or branch.variant == variant):
            return branch
    raise KeyError(f"{name} [{variant}]")


@dataclass(frozen=True)
class Candidate:
    """An operation branch or workspace symbol that fits a typed hole."""
    kind: str  # "op" or "symbol"
    name: str
    type: TypeExpr
    subst: Substitution = field(compare=False)
    signature: Optional[OpSignature] = None

    @property
    def is_op(self) -> bool:
        return self.kind == "op"


def candidates_for(goal: TypeExpr, s: Substitution, symbols: Sequence[Tuple[str, TypeExpr]],
                   include_ops: bool = True, allow_higher_order: bool = True) -> List[Candidate]:
    """
    Every operation branch whose instantiated return type unifies with ``goal``,
    then every symbol whose type does; ops in table order, symbols in the given order.

    Raises:
        NoCandidates: if nothing fits
    """
    found: List[Candidate] = []
    if include_ops:
        for branch in BRANCHES:
            if branch.is_higher_order and not allow_higher_order:
                continue
            inst = instantiate(branch)
            try:
                s2 = unify(inst.ret, goal, s)
            except UnificationFailure:
                continue
            found.append(Candidate("op", inst.name, inst.ret, s2, inst))
    for key, t in symbols:
        try:
            s2 = unify(t, goal, s)
        except UnificationFailure:
            continue
        found.append(Candidate("symbol", key, t, s2))
    if not found:
        raise NoCandidates(f"no operation or symbol produces {goal}")
    return found


def signature_table() -> List[Dict[str, object]]:
    """Machine-readable listing of the 40 operations, one record per op."""
    return [
        {
            "name": sig.name,
            "params": [_display(p) for p in sig.params],
            "ret": _display(sig.ret),
            "category": sig.category,
            "description": sig.description,
        }
        for sig in SIGNATURES
    ]


def _display(t: TypeExpr) -> str:
    names = {-1: "A", -2: "B", -3: "A", -4: "B"}
    text = str(t)
    for v in iter_vars(t):
        text = text.replace(str(v), names.get(v.id, str(v)) + (f":{v.constraint}" if v.constraint else ""))
    return text
