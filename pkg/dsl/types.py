"""
Type expressions of the DSL and first-order unification over them.

Type variables carry an optional constraint: ``Arithmetic`` (Int or Loc) or
``Comparable`` (Int). Substitutions are persistent: ``unify`` never mutates
the substitution it is given.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Set, Tuple, Union

from models.errors import UnificationFailure

ARITHMETIC = "Arithmetic"
COMPARABLE = "Comparable"

CONCRETE_NAMES = ("Int", "Bool", "Color", "Loc", "Connectivity", "Direction", "Orientation", "Region")


@dataclass(frozen=True)
class Concrete:
    name: str

    def __post_init__(self):
        if self.name not in CONCRETE_NAMES:
            raise ValueError(f"unknown concrete type {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ListOf:
    elem: "TypeExpr"

    def __str__(self) -> str:
        return f"List[{self.elem}]"


@dataclass(frozen=True)
class PairOf:
    first: "TypeExpr"
    second: "TypeExpr"

    def __str__(self) -> str:
        return f"Pair[{self.first}, {self.second}]"


@dataclass(frozen=True)
class FunctionOf:
    arg: "TypeExpr"
    ret: "TypeExpr"

    def __str__(self) -> str:
        return f"({self.arg} -> {self.ret})"


@dataclass(frozen=True)
class UnionOf:
    members: Tuple["TypeExpr", ...]

    def __post_init__(self):
        if len(set(self.members)) < 2:
            raise ValueError("a union needs at least two distinct members")

    def __str__(self) -> str:
        return f"Union[{', '.join(str(m) for m in self.members)}]"


@dataclass(frozen=True)
class Var:
    id: int
    constraint: Optional[str] = None

    def __post_init__(self):
        if self.constraint not in (None, ARITHMETIC, COMPARABLE):
            raise ValueError(f"unknown constraint {self.constraint!r}")

    def __str__(self) -> str:
        suffix = f":{self.constraint}" if self.constraint else ""
        return f"T{self.id}{suffix}"


TypeExpr = Union[Concrete, ListOf, PairOf, FunctionOf, UnionOf, Var]

INT = Concrete("Int")
BOOL = Concrete("Bool")
COLOR = Concrete("Color")
LOC = Concrete("Loc")
CONNECTIVITY = Concrete("Connectivity")
DIRECTION = Concrete("Direction")
ORIENTATION = Concrete("Orientation")
REGION = Concrete("Region")

CONSTRAINT_MEMBERS: Dict[str, Tuple[Concrete, ...]] = {
    ARITHMETIC: (INT, LOC),
    COMPARABLE: (INT,),
}

_var_ids = itertools.count(1)


def fresh_var(constraint: Optional[str] = None) -> Var:
    """A type variable whose id has never been handed out before in this process."""
    return Var(next(_var_ids), constraint)


class Substitution:
    """Persistent mapping from type-variable id to type expression."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Optional[Dict[int, TypeExpr]] = None):
        self._map: Dict[int, TypeExpr] = dict(mapping or {})

    def get(self, var_id: int) -> Optional[TypeExpr]:
        return self._map.get(var_id)

    def extend(self, var_id: int, t: TypeExpr) -> "Substitution":
        mapping = dict(self._map)
        mapping[var_id] = t
        return Substitution(mapping)

    def items(self):
        return self._map.items()

    def __len__(self) -> int:
        return len(self._map)

    def __contains__(self, var_id: int) -> bool:
        return var_id in self._map

    def __repr__(self) -> str:
        return "{" + ", ".join(f"T{k}->{v}" for k, v in sorted(self._map.items())) + "}"


EMPTY = Substitution()


def walk(t: TypeExpr, s: Substitution) -> TypeExpr:
    """Follow variable bindings at the top level only."""
    while isinstance(t, Var):
        bound = s.get(t.id)
        if bound is None:
            return t
        t = bound
    return t


def resolve(t: TypeExpr, s: Substitution) -> TypeExpr:
    """Apply the substitution everywhere inside ``t``."""
    t = walk(t, s)
    if isinstance(t, ListOf):
        return ListOf(resolve(t.elem, s))
    if isinstance(t, PairOf):
        return PairOf(resolve(t.first, s), resolve(t.second, s))
    if isinstance(t, FunctionOf):
        return FunctionOf(resolve(t.arg, s), resolve(t.ret, s))
    if isinstance(t, UnionOf):
        return UnionOf(tuple(resolve(m, s) for m in t.members))
    return t


def iter_vars(t: TypeExpr) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, ListOf):
        yield from iter_vars(t.elem)
    elif isinstance(t, PairOf):
        yield from iter_vars(t.first)
        yield from iter_vars(t.second)
    elif isinstance(t, FunctionOf):
        yield from iter_vars(t.arg)
        yield from iter_vars(t.ret)
    elif isinstance(t, UnionOf):
        for m in t.members:
            yield from iter_vars(m)


def free_vars(t: TypeExpr, s: Substitution = EMPTY) -> Set[int]:
    return {v.id for v in iter_vars(resolve(t, s))}


def is_ground(t: TypeExpr) -> bool:
    return next(iter_vars(t), None) is None


def _members_of(v: Var) -> Optional[Tuple[Concrete, ...]]:
    return CONSTRAINT_MEMBERS.get(v.constraint) if v.constraint else None


def _bind(v: Var, t: TypeExpr, s: Substitution) -> Substitution:
    if isinstance(t, UnionOf):
        return _unify_union(t, v, s)
    if v.id in free_vars(t, s):
        raise UnificationFailure(f"occurs check: {v} in {resolve(t, s)}")
    members = _members_of(v)
    if members is not None and t not in members:
        raise UnificationFailure(f"{resolve(t, s)} does not satisfy {v.constraint}")
    return s.extend(v.id, t)


def _unify_vars(a: Var, b: Var, s: Substitution) -> Substitution:
    ma, mb = _members_of(a), _members_of(b)
    if ma is None:
        return s.extend(a.id, b)
    if mb is None:
        return s.extend(b.id, a)
    if a.constraint == b.constraint:
        return s.extend(a.id, b)
    common = [m for m in ma if m in mb]
    if not common:
        raise UnificationFailure(f"{a.constraint} and {b.constraint} share no member")
    if len(common) == 1:
        return s.extend(a.id, common[0]).extend(b.id, common[0])
    narrower = a if len(ma) < len(mb) else b
    other = b if narrower is a else a
    return s.extend(other.id, narrower)


def _unify_union(u: UnionOf, other: TypeExpr, s: Substitution) -> Substitution:
    for member in u.members:
        try:
            return unify(member, other, s)
        except UnificationFailure:
            continue
    raise UnificationFailure(f"{resolve(other, s)} matches no member of {u}")


def unify(a: TypeExpr, b: TypeExpr, s: Substitution = EMPTY) -> Substitution:
    """
    Extend ``s`` so that ``a`` and ``b`` become equal.

    Raises:
        UnificationFailure: if no such extension exists
    """
    a, b = walk(a, s), walk(b, s)
    if a == b:
        return s
    if isinstance(a, Var) and isinstance(b, Var):
        return _unify_vars(a, b, s)
    if isinstance(a, Var):
        return _bind(a, b, s)
    if isinstance(b, Var):
        return _bind(b, a, s)
    if isinstance(a, UnionOf):
        return _unify_union(a, b, s)
    if isinstance(b, UnionOf):
        return _unify_union(b, a, s)
    if isinstance(a, ListOf) and isinstance(b, ListOf):
        return unify(a.elem, b.elem, s)
    if isinstance(a, PairOf) and isinstance(b, PairOf):
        return unify(a.second, b.second, unify(a.first, b.first, s))
    if isinstance(a, FunctionOf) and isinstance(b, FunctionOf):
        return unify(a.ret, b.ret, unify(a.arg, b.arg, s))
    raise UnificationFailure(f"cannot unify {a} with {b}")


def unifies(a: TypeExpr, b: TypeExpr, s: Substitution = EMPTY) -> bool:
    try:
        unify(a, b, s)
        return True
    except UnificationFailure:
        return False


def rename_vars(t: TypeExpr, mapping: Dict[int, Var]) -> TypeExpr:
    """Replace variables by id; ids missing from ``mapping`` get fresh variables."""
    if isinstance(t, Var):
        if t.id not in mapping:
            mapping[t.id] = fresh_var(t.constraint)
        return mapping[t.id]
    if isinstance(t, ListOf):
        return ListOf(rename_vars(t.elem, mapping))
    if isinstance(t, PairOf):
        return PairOf(rename_vars(t.first, mapping), rename_vars(t.second, mapping))
    if isinstance(t, FunctionOf):
        return FunctionOf(rename_vars(t.arg, mapping), rename_vars(t.ret, mapping))
    if isinstance(t, UnionOf):
        return UnionOf(tuple(rename_vars(m, mapping) for m in t.members))
    return t


def type_key(t: TypeExpr, s: Substitution = EMPTY) -> str:
    """Resolved type as text with variables renamed A, B, ... by first appearance."""
    t = resolve(t, s)
    names: Dict[int, str] = {}
    for v in iter_vars(t):
        if v.id not in names:
            names[v.id] = chr(ord("A") + len(names) % 26) + (str(len(names) // 26) if len(names) >= 26 else "")
    return _format(t, names)


def _format(t: TypeExpr, names: Dict[int, str]) -> str:
    if isinstance(t, Var):
        return names[t.id] + (f":{t.constraint}" if t.constraint else "")
    if isinstance(t, ListOf):
        return f"List[{_format(t.elem, names)}]"
    if isinstance(t, PairOf):
        return f"Pair[{_format(t.first, names)}, {_format(t.second, names)}]"
    if isinstance(t, FunctionOf):
        return f"({_format(t.arg, names)} -> {_format(t.ret, names)})"
    if isinstance(t, UnionOf):
        return f"Union[{', '.join(_format(m, names) for m in t.members)}]"
    return str(t)
