"""
Dataflow Analyzer Module
Forward line-set propagation over a scope's CFG and the mutation diffusion
score computed from it
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .models import Cfg, Policy, Statement
from ..utils.error_handler import NonTerminationError

logger = logging.getLogger(__name__)

# variable -> lines traversed since its last definition or mutation
MutationState = Dict[str, FrozenSet[int]]


def transfer(statement: Statement, state: Mapping[str, FrozenSet[int]], policy: Policy) -> MutationState:
    """
    Add the statement's line to every tracked variable, then empty the sets
    of the variables it defines or updates. Placeholder and synthetic
    statements leave the state unchanged.
    """
    if not statement.countable:
        return dict(state)
    out = {variable: lines | {statement.line} for variable, lines in state.items()}
    for variable in statement.def_set | statement.update_set(policy):
        out[variable] = frozenset()
    return out


def meet(states: Iterable[Mapping[str, FrozenSet[int]]]) -> MutationState:
    """Per-variable union"""
    merged: Dict[str, FrozenSet[int]] = {}
    for state in states:
        for variable, lines in state.items():
            merged[variable] = merged.get(variable, frozenset()) | lines
    return merged


@dataclass(frozen=True)
class MutationContribution:
    statement_id: int
    line: int
    variable: str
    contribution: int

    def to_dict(self) -> Dict[str, object]:
        return {"line": self.line, "variable": self.variable, "contribution": self.contribution}


@dataclass
class DataflowResult:
    """IN state of every statement of one scope under one policy"""
    scope_name: str
    policy: Policy
    in_states: Dict[int, MutationState] = field(default_factory=dict)
    block_in: Dict[int, MutationState] = field(default_factory=dict)
    block_out: Dict[int, MutationState] = field(default_factory=dict)
    iterations: int = 0

    def state_at(self, statement_id: int) -> MutationState:
        return self.in_states.get(statement_id, {})


class DataflowAnalyzer:
    """Worklist fixpoint of the line-set analysis"""

    def run_dataflow(self, cfg: Cfg, policy: Policy,
                     entry_state: Optional[Mapping[str, FrozenSet[int]]] = None) -> DataflowResult:
        """
        Args:
            cfg: Control-flow graph of one scope
            policy: Which UPDATE sets empty the line sets
            entry_state: State entering the scope; defaults to the scope's
                parameters mapped to empty sets

        Returns:
            DataflowResult with the IN state of every statement

        Raises:
            NonTerminationError: Iteration count exceeded the lattice bound
        """
        policy = Policy(policy)
        scope = cfg.scope
        if entry_state is None:
            entry_state = {param: frozenset() for param in scope.params}
        entry_state = dict(entry_state)

        block_ids = [block.id for block in cfg.blocks]
        variables = scope.variables() | set(entry_state)
        lines = {stmt.line for stmt in scope.statements}
        edge_count = cfg.graph.number_of_edges()
        bound = (len(block_ids) + edge_count) * max(1, len(variables)) * (len(lines) + 1) + len(block_ids)

        block_in: Dict[int, MutationState] = {}
        block_out: Dict[int, MutationState] = {}
        worklist: Deque[int] = deque(block_ids)
        queued = set(block_ids)
        iterations = 0

        while worklist:
            block_id = worklist.popleft()
            queued.discard(block_id)
            iterations += 1
            if iterations > bound:
                raise NonTerminationError(scope.name, iterations, bound)

            incoming = [block_out[p] for p in cfg.predecessors(block_id) if p in block_out]
            if block_id == cfg.entry:
                incoming.append(entry_state)
            state_in = meet(incoming)
            block_in[block_id] = state_in

            state_out = self._transfer_block(cfg, block_id, state_in, policy)
            if block_out.get(block_id) != state_out:
                block_out[block_id] = state_out
                for successor in cfg.successors(block_id):
                    if successor != cfg.exit and successor not in queued:
                        worklist.append(successor)
                        queued.add(successor)

        in_states: Dict[int, MutationState] = {}
        for block in cfg.blocks:
            state = block_in.get(block.id, {})
            for statement_id in block.statement_ids:
                in_states[statement_id] = state
                state = transfer(scope.statement(statement_id), state, policy)

        logger.debug(f"Dataflow {scope.name} ({policy.value}): {iterations} iterations over {len(block_ids)} blocks")
        return DataflowResult(scope_name=scope.name, policy=policy, in_states=in_states,
                              block_in=block_in, block_out=block_out, iterations=iterations)

    @staticmethod
    def _transfer_block(cfg: Cfg, block_id: int, state: MutationState, policy: Policy) -> MutationState:
        for statement_id in cfg.block(block_id).statement_ids:
            state = transfer(cfg.scope.statement(statement_id), state, policy)
        return state

    def mutation_diffusion_score(self, cfg: Cfg, result: DataflowResult,
                                 policy: Policy) -> Tuple[int, List[MutationContribution]]:
        """
        Every updated variable of every statement contributes the size of its
        IN line set (0 when the variable is not tracked yet)

        Returns:
            (score, contributions in statement order, zeros included)
        """
        policy = Policy(policy)
        contributions: List[MutationContribution] = []
        for statement in cfg.scope.statements:
            if not statement.countable:
                continue
            state = result.state_at(statement.id)
            for variable in sorted(statement.update_set(policy)):
                contributions.append(MutationContribution(
                    statement_id=statement.id,
                    line=statement.line,
                    variable=variable,
                    contribution=len(state.get(variable, ())),
                ))
        return sum(c.contribution for c in contributions), contributions
