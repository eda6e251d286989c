"""
ProgramGenerator tool: breadth-first, type-directed sampling of DSL programs.

Each typed hole is filled by an operation branch or a workspace symbol whose
type unifies with the hole. Candidates that could not be completed inside the
node and depth limits are filtered out beforehand using a table of minimal
completion costs; the rest are sampled by policy weight. Subprogram arguments
of higher-order operations are generated as separate programs after the
enclosing one, with their own limits and one more level of nesting.
"""

import logging
import random
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

sys.path.append(str(Path(__file__).parent.parent))
from models.errors import GenerationDeadEnd, NoCandidates, UnificationFailure
from models.schema import GenLimits
from dsl.frontier import Frontier, GenContext, Hole
from dsl.program import FUNCTIONAL_INPUT, OpCall, Program, Subprogram, SymbolLeaf
from dsl.signatures import BRANCHES, Candidate, candidates_for, instantiate
from dsl.types import EMPTY, REGION, FunctionOf, Substitution, TypeExpr, resolve, type_key, unifies, unify
from dsl.workspace import WorkspaceTemplate
from tools.policy import Policy

logger = logging.getLogger(__name__)

INF = float("inf")


class CompletionCosts:
    """
    Minimal number of nodes needed to complete a hole of a given type.

    Costs are memoized per canonical type, remaining depth, nesting level and
    element type, so one table serves every generation over the same symbols.
    """

    def __init__(self, symbol_types: Sequence[TypeExpr], limits: GenLimits):
        self.symbol_types = tuple(dict.fromkeys(symbol_types))
        self.limits = limits
        self._memo: Dict[Tuple[str, int, int, bool], float] = {}

    def cost(self, goal: TypeExpr, s: Substitution, remaining_depth: int, level: int,
             input_type: Optional[TypeExpr] = None) -> float:
        if remaining_depth < 1:
            return INF
        g = resolve(goal, s)
        it = resolve(input_type, s) if input_type is not None else None
        key = (type_key(g if it is None else FunctionOf(it, g)), remaining_depth, level, it is not None)
        cached = self._memo.get(key)
        if cached is None:
            cached = self._memo[key] = self._compute(g, remaining_depth, level, it)
        return cached

    def body_cost(self, fn_type: FunctionOf, s: Substitution, level: int) -> float:
        """Minimal size of a subprogram body at nesting ``level``."""
        if level > self.limits.max_nesting:
            return INF
        return self.cost(fn_type.ret, s, self.limits.max_depth, level, fn_type.arg)

    def _compute(self, goal: TypeExpr, remaining_depth: int, level: int,
                 input_type: Optional[TypeExpr]) -> float:
        leaves = self.symbol_types if input_type is None else self.symbol_types + (input_type,)
        if any(unifies(t, goal) for t in leaves):
            return 1
        if remaining_depth == 1:
            return INF
        best = INF
        for branch in BRANCHES:
            if 1 + branch.arity >= best:
                continue
            if branch.is_higher_order and level >= self.limits.max_nesting:
                continue
            inst = instantiate(branch)
            try:
                s = unify(inst.ret, goal)
            except UnificationFailure:
                continue
            total = 1
            for param in inst.params:
                if isinstance(param, FunctionOf):
                    total += 1 if self.body_cost(param, s, level + 1) <= self.limits.max_nodes else INF
                else:
                    total += self.cost(param, s, remaining_depth - 1, level, input_type)
                if total >= best:
                    break
            best = min(best, total)
        return best if best <= self.limits.max_nodes else INF


_COST_TABLES: Dict[Tuple, CompletionCosts] = {}


def completion_costs(symbol_types: Sequence[TypeExpr], limits: GenLimits) -> CompletionCosts:
    key = (
        tuple(sorted({type_key(t) for t in symbol_types})),
        limits.max_nodes, limits.max_depth, limits.max_nesting,
    )
    if key not in _COST_TABLES:
        _COST_TABLES[key] = CompletionCosts(symbol_types, limits)
    return _COST_TABLES[key]


@dataclass(frozen=True)
class _Slot:
    kind: str  # "op" or "symbol"
    name: str
    type: TypeExpr
    children: Tuple[int, ...] = ()
    params: Tuple[TypeExpr, ...] = ()
    variant: Optional[str] = None


class _State:
    __slots__ = ("subst", "frontier", "slots")

    def __init__(self, subst: Substitution, frontier: Frontier, slots: Dict[int, _Slot]):
        self.subst = subst
        self.frontier = frontier
        self.slots = slots

    def copy(self) -> "_State":
        return _State(self.subst, self.frontier.copy(), dict(self.slots))


@dataclass
class _Decision:
    state: _State
    hole: Hole
    context: GenContext
    options: List[Candidate]
    weights: List[float] = field(default_factory=list)


class ProgramGenerator:
    """Samples well-typed programs within limits for one workspace template."""

    def __init__(self, template: WorkspaceTemplate, policy: Policy, limits: Optional[GenLimits] = None):
        self.template = template
        self.symbols = template.symbols()
        self.policy = policy
        self.limits = limits or GenLimits()
        self.costs = completion_costs([t for _, t in self.symbols], self.limits)

    def generate(self, rng: random.Random) -> Program:
        """
        Generate one top-level program (root type Region).

        Args:
            rng: source of every random choice

        Returns:
            A program that type-checks and respects the limits

        Raises:
            GenerationDeadEnd: if the backtracking budget runs out
        """
        state = _State(EMPTY, Frontier.initial(REGION), {})
        stack: List[_Decision] = []
        backtracks = 0
        while (hole := state.frontier.advance()) is not None:
            stack.append(self._decide(state, hole))
            while True:
                next_state = self._try_options(stack[-1], rng)
                if next_state is not None:
                    state = next_state
                    break
                stack.pop()
                backtracks += 1
                if not stack or backtracks > self.limits.backtrack_budget:
                    raise GenerationDeadEnd(
                        f"no completion after {backtracks} backtracks (hole of type {type_key(hole.goal, state.subst)})"
                    )
        program = self._build(state)
        logger.debug(f"Generated {program.text} ({backtracks} backtracks)")
        return program

    def filter_feasible(self, candidates: Sequence[Candidate], ctx: GenContext) -> List[Candidate]:
        """
        Drop candidates that cannot be completed within the remaining budget.

        Leaves always fit while a node remains. Operations are dropped at the
        depth limit, when higher-order and the nesting limit is reached, or
        when their cheapest completion exceeds the nodes left after the other
        open holes are paid for.
        """
        limits = self.limits
        remaining_depth = limits.max_depth - ctx.depth
        budget = limits.max_nodes - ctx.current_size - ctx.reserved
        kept = []
        for cand in candidates:
            if not cand.is_op:
                if budget >= 1:
                    kept.append(cand)
                continue
            sig = cand.signature
            if remaining_depth < 1:
                continue
            if sig.is_higher_order and ctx.nesting_level >= limits.max_nesting:
                continue
            need = 1
            for param in sig.params:
                if isinstance(param, FunctionOf):
                    fits = self.costs.body_cost(param, cand.subst, ctx.nesting_level + 1) <= limits.max_nodes
                    need += 1 if fits else INF
                else:
                    need += self.costs.cost(param, cand.subst, remaining_depth, ctx.nesting_level, ctx.input_type)
                if need > budget:
                    break
            if need <= budget:
                kept.append(cand)
        return kept

    def _symbols_for(self, state: _State, hole: Hole) -> List[Tuple[str, TypeExpr]]:
        frame = state.frontier.frame(hole)
        if frame.input_type is None:
            return list(self.symbols)
        return list(self.symbols) + [(FUNCTIONAL_INPUT, frame.input_type)]

    def _hole_cost(self, state: _State, hole: Hole) -> float:
        frame = state.frontier.frame(hole)
        return self.costs.cost(hole.goal, state.subst, self.limits.max_depth - hole.depth + 1,
                               frame.level, frame.input_type)

    def _decide(self, state: _State, hole: Hole) -> _Decision:
        frame = state.frontier.frame(hole)
        reserved = sum(self._hole_cost(state, h) for h in state.frontier.queue[1:])
        ctx = state.frontier.context(hole, state.subst, int(min(reserved, self.limits.max_nodes + 1)))
        try:
            candidates = candidates_for(
                hole.goal, state.subst, self._symbols_for(state, hole),
                include_ops=hole.depth < self.limits.max_depth,
                allow_higher_order=frame.level < self.limits.max_nesting,
            )
        except NoCandidates:
            candidates = []
        options = self.filter_feasible(candidates, ctx)
        return _Decision(state, hole, ctx, options, self._weigh(ctx, options))

    def _weigh(self, ctx: GenContext, options: List[Candidate]) -> List[float]:
        raw = self.policy.score(ctx, options) if options else []
        branches = Counter(c.name for c in options if c.is_op)
        weights = []
        for cand, w in zip(options, raw):
            if cand.is_op:
                w = w * self.limits.nonterminal_coef / branches[cand.name]
            weights.append(max(float(w), 0.0))
        if options and not any(weights):
            weights = [1.0] * len(options)
        return weights

    def _try_options(self, decision: _Decision, rng: random.Random) -> Optional[_State]:
        while decision.options:
            i = rng.choices(range(len(decision.options)), weights=decision.weights)[0]
            option = decision.options.pop(i)
            decision.weights.pop(i)
            if decision.options and not any(decision.weights):
                decision.weights = [1.0] * len(decision.options)
            state = self._apply(decision.state, decision.hole, option)
            if state is not None:
                return state
        return None

    def _apply(self, state: _State, hole: Hole, option: Candidate) -> Optional[_State]:
        new = state.copy()
        new.subst = option.subst
        if option.is_op:
            sig = option.signature
            children = new.frontier.fill(hole, sig.name, sig.params)
            new.slots[hole.slot] = _Slot("op", sig.name, sig.ret, tuple(children), sig.params, sig.variant)
        else:
            new.frontier.fill(hole, option.name, ())
            new.slots[hole.slot] = _Slot("symbol", option.name, option.type)
        return new if self._still_feasible(new) else None

    def _still_feasible(self, state: _State) -> bool:
        """Every open hole and pending body can still be completed under the new substitution."""
        queue = state.frontier.queue
        if queue:
            frame = state.frontier.frame(queue[0])
            owed = sum(self._hole_cost(state, h) for h in queue)
            if frame.nodes + owed > self.limits.max_nodes:
                return False
        for body in state.frontier.deferred:
            if self.costs.body_cost(body.fn_type, state.subst, body.level) > self.limits.max_nodes:
                return False
        return True

    def _build(self, state: _State) -> Program:
        s = state.subst

        def build(slot_id: int):
            slot = state.slots[slot_id]
            if slot.kind == "symbol":
                return SymbolLeaf(slot.name, resolve(slot.type, s))
            args = []
            for child, param in zip(slot.children, slot.params):
                if isinstance(param, FunctionOf):
                    args.append(Subprogram(build(child), resolve(param.arg, s), resolve(param, s)))
                else:
                    args.append(build(child))
            return OpCall(slot.name, tuple(args), resolve(slot.type, s), slot.variant)

        return Program(build(0))


def generate(w_template: WorkspaceTemplate, policy: Policy, limits: Optional[GenLimits] = None,
             rng_seed: Union[int, random.Random, None] = None) -> Program:
    """Generate one program; ``rng_seed`` may be a seed or a live ``random.Random``."""
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    return ProgramGenerator(w_template, policy, limits).generate(rng)
