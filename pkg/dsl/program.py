"""
Program ASTs: operation calls, symbol leaves and subprograms.

Types are carried on nodes for the generator, the policy and the debug
evaluator, but never take part in equality: two programs are equal iff their
canonical text is equal.
"""

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Tuple, Union

from models.grid import canonical_hash
from dsl.types import TypeExpr

ROOT_PARENT = "<root>"
FN_KEYWORD = "Fn"
FUNCTIONAL_INPUT = "FunctionalInput"


@dataclass(frozen=True)
class SymbolLeaf:
    key: str
    type: Optional[TypeExpr] = field(default=None, compare=False)


@dataclass(frozen=True)
class OpCall:
    op: str
    args: Tuple["AstNode", ...]
    type: Optional[TypeExpr] = field(default=None, compare=False)
    variant: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class Subprogram:
    body: "AstNode"
    input_type: Optional[TypeExpr] = field(default=None, compare=False)
    type: Optional[TypeExpr] = field(default=None, compare=False)


AstNode = Union[SymbolLeaf, OpCall, Subprogram]


def children(node: AstNode) -> Tuple[AstNode, ...]:
    """Children within the same (sub)program; a subprogram's body is not one."""
    return node.args if isinstance(node, OpCall) else ()


def own_nodes(root: AstNode) -> List[AstNode]:
    """Breadth-first nodes of one (sub)program, stopping at Subprogram boundaries."""
    order, queue = [], deque([root])
    while queue:
        node = queue.popleft()
        order.append(node)
        queue.extend(children(node))
    return order


def depth_of(root: AstNode) -> int:
    kids = children(root)
    return 1 + (max(depth_of(k) for k in kids) if kids else 0)


def iter_programs(root: AstNode, nesting_level: int = 0) -> Iterator[Tuple[AstNode, int]]:
    """Yield (root, nesting level) for the program and every nested subprogram."""
    yield root, nesting_level
    for node in own_nodes(root):
        if isinstance(node, Subprogram):
            yield from iter_programs(node.body, nesting_level + 1)


@dataclass(frozen=True)
class NodeContext:
    """Where a node sits: the features a policy is keyed on."""
    node: AstNode
    parent: str
    child_index: int
    depth: int
    nesting_level: int
    index: int


def walk_breadth_first(root: AstNode) -> List[NodeContext]:
    """
    Every node of the program, subprogram bodies included, with its context.

    Subprogram bodies are visited after the enclosing program, in the order
    their Fn nodes were met. A body's parent is the higher-order operation and
    its child index is the Fn argument position.
    """
    result: List[NodeContext] = []
    programs = deque([(root, ROOT_PARENT, 0, 0)])
    while programs:
        prog_root, parent, child_index, level = programs.popleft()
        queue = deque([(prog_root, parent, child_index, 1)])
        while queue:
            node, p, ci, d = queue.popleft()
            result.append(NodeContext(node, p, ci, d, level, len(result)))
            if isinstance(node, OpCall):
                for i, arg in enumerate(node.args):
                    if isinstance(arg, Subprogram):
                        programs.append((arg.body, node.op, i, level + 1))
                    else:
                        queue.append((arg, node.op, i, d + 1))
    return result


def to_text(node: AstNode) -> str:
    """Canonical fully parenthesized prefix form, e.g. ``(Paint (Scene) (Red))``."""
    if isinstance(node, SymbolLeaf):
        return f"({node.key})"
    if isinstance(node, Subprogram):
        return f"({FN_KEYWORD} {to_text(node.body)})"
    if not node.args:
        return f"({node.op})"
    return f"({node.op} {' '.join(to_text(a) for a in node.args)})"


@dataclass(frozen=True)
class Program:
    """A typed expression tree; top-level programs return a Region."""
    root: AstNode

    @cached_property
    def text(self) -> str:
        return to_text(self.root)

    def canonical_text(self) -> str:
        return self.text

    @cached_property
    def digest(self) -> str:
        return canonical_hash(self)

    @cached_property
    def node_count(self) -> int:
        return len(own_nodes(self.root))

    @cached_property
    def depth(self) -> int:
        return depth_of(self.root)

    @cached_property
    def nesting_level(self) -> int:
        """Deepest subprogram nesting (0 when no higher-order op is used)."""
        return max(level for _, level in iter_programs(self.root))

    @cached_property
    def node_index(self) -> Dict[int, int]:
        return {id(ctx.node): ctx.index for ctx in walk_breadth_first(self.root)}

    def index_of(self, node: AstNode) -> Optional[int]:
        return self.node_index.get(id(node))

    def within(self, max_nodes: int, max_depth: int, max_nesting: int) -> bool:
        """Every (sub)program meets the node and depth limits; nesting is bounded."""
        for body, level in iter_programs(self.root):
            if level > max_nesting:
                return False
            if len(own_nodes(body)) > max_nodes or depth_of(body) > max_depth:
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return self.text == other.text

    def __hash__(self) -> int:
        return hash(self.text)

    def __str__(self) -> str:
        return self.text
