"""
Metrics Calculator Module
Variable lifetimes, mutating statement ratios and mutation diffusion scores
per scope, plus file-level totals
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .cfg_builder import CfgBuilder, ScopeParser
from .dataflow_analyzer import DataflowAnalyzer, MutationContribution
from .models import Cfg, Policy, Scope, ScopeKind, SourceUnit
from .spec_table import MutationSpecTable
from ..utils.error_handler import EmptyScopeError

logger = logging.getLogger(__name__)

POLICY_SUFFIX = {Policy.OPTIMISTIC: "opt", Policy.CONSERVATIVE: "cons"}


def policy_suffix(policy: Union[Policy, str]) -> str:
    return POLICY_SUFFIX[Policy(policy)]


@dataclass
class MetricsRecord:
    """Metrics of one scope with at least one countable statement"""
    scope: str
    kind: ScopeKind
    line: int
    statement_count: int
    lifetimes: Dict[str, int]
    mutating_count_opt: int
    mutating_count_cons: int
    mutating_ratio_opt: float
    mutating_ratio_cons: float
    diffusion_opt: int
    diffusion_cons: int
    diffusion_normalized_opt: float
    diffusion_normalized_cons: float
    contributions_opt: Tuple[MutationContribution, ...] = ()
    contributions_cons: Tuple[MutationContribution, ...] = ()

    def value(self, metric: str, policy: Union[Policy, str]):
        """e.g. value('diffusion', 'optimistic') -> diffusion_opt"""
        return getattr(self, f"{metric}_{policy_suffix(policy)}")

    @property
    def variable_count(self) -> int:
        return len(self.lifetimes)

    @property
    def max_lifetime(self) -> Optional[int]:
        return max(self.lifetimes.values()) if self.lifetimes else None

    @property
    def mean_lifetime(self) -> Optional[float]:
        return sum(self.lifetimes.values()) / len(self.lifetimes) if self.lifetimes else None


@dataclass
class UnitMetrics:
    """File-level totals summed over the analysed scopes"""
    statement_count: int = 0
    mutating_count_opt: int = 0
    mutating_count_cons: int = 0
    diffusion_opt: int = 0
    diffusion_cons: int = 0
    variable_count: int = 0

    @classmethod
    def from_records(cls, records: Sequence[MetricsRecord]) -> "UnitMetrics":
        return cls(
            statement_count=sum(r.statement_count for r in records),
            mutating_count_opt=sum(r.mutating_count_opt for r in records),
            mutating_count_cons=sum(r.mutating_count_cons for r in records),
            diffusion_opt=sum(r.diffusion_opt for r in records),
            diffusion_cons=sum(r.diffusion_cons for r in records),
            variable_count=sum(r.variable_count for r in records),
        )

    def value(self, metric: str, policy: Union[Policy, str]) -> Optional[float]:
        suffix = policy_suffix(policy)
        if metric == "mutating_ratio":
            count = getattr(self, f"mutating_count_{suffix}")
            return count / self.statement_count if self.statement_count else None
        if metric == "diffusion_normalized":
            score = getattr(self, f"diffusion_{suffix}")
            return score / self.statement_count if self.statement_count else None
        return getattr(self, f"{metric}_{suffix}")


@dataclass
class UnitAnalysis:
    """
    Per-scope records of one unit; scopes without countable statements are
    listed by name. CFGs are keyed by (scope name, first line) since cells and
    classes may define the same name more than once.
    """
    records: List[MetricsRecord] = field(default_factory=list)
    empty_scopes: List[str] = field(default_factory=list)
    cfgs: Dict[Tuple[str, int], Cfg] = field(default_factory=dict)

    @property
    def totals(self) -> UnitMetrics:
        return UnitMetrics.from_records(self.records)


class MetricsCalculator:
    """Computes every per-scope metric of a SourceUnit"""

    def __init__(self, table: Optional[MutationSpecTable] = None):
        self.scope_parser = ScopeParser(table)
        self.cfg_builder = CfgBuilder()
        self.dataflow = DataflowAnalyzer()

    def compute_lifetimes(self, scope: Scope) -> Dict[str, int]:
        """
        Lifetime = last read/update line - first definition line + 1, at least 1.
        Parameters are defined at the scope's first line.
        """
        first_def: Dict[str, int] = {param: scope.line for param in scope.params}
        for stmt in scope.countable_statements:
            for variable in stmt.def_set:
                if variable not in first_def or stmt.line < first_def[variable]:
                    first_def[variable] = stmt.line

        last_use: Dict[str, int] = {}
        for stmt in scope.countable_statements:
            for variable in stmt.reads | stmt.update_set_cons:
                if variable in first_def:
                    last_use[variable] = max(last_use.get(variable, stmt.line), stmt.line)

        return {
            variable: max(last_use.get(variable, line) - line + 1, 1)
            for variable, line in sorted(first_def.items())
        }

    def mutating_statement_ratio(self, scopes: Union[Scope, Sequence[Scope]], policy: Policy) -> float:
        """
        Fraction of countable statements whose UPDATE set is non-empty

        Raises:
            EmptyScopeError: No countable statement
        """
        scopes = [scopes] if isinstance(scopes, Scope) else list(scopes)
        statements = [s for scope in scopes for s in scope.countable_statements]
        if not statements:
            raise EmptyScopeError(",".join(scope.name for scope in scopes) or "<none>")
        mutating = sum(1 for s in statements if s.update_set(policy))
        return mutating / len(statements)

    @staticmethod
    def normalize_score(score: int, statement_count: int, scope_name: str = "") -> float:
        """
        Raises:
            EmptyScopeError: statement_count is not positive
        """
        if statement_count <= 0:
            raise EmptyScopeError(scope_name or "<unknown>")
        return score / statement_count

    def analyze_scope(self, scope: Scope, cfg: Optional[Cfg] = None) -> MetricsRecord:
        """
        Raises:
            EmptyScopeError: The scope has no countable statement
        """
        statements = scope.countable_statements
        if not statements:
            raise EmptyScopeError(scope.name)
        cfg = cfg or self.cfg_builder.build_cfg(scope)

        per_policy = {}
        for policy in Policy:
            result = self.dataflow.run_dataflow(cfg, policy)
            score, contributions = self.dataflow.mutation_diffusion_score(cfg, result, policy)
            mutating = sum(1 for s in statements if s.update_set(policy))
            per_policy[policy] = (mutating, score, tuple(contributions))

        opt_mutating, opt_score, opt_contributions = per_policy[Policy.OPTIMISTIC]
        cons_mutating, cons_score, cons_contributions = per_policy[Policy.CONSERVATIVE]
        count = len(statements)
        return MetricsRecord(
            scope=scope.name,
            kind=scope.kind,
            line=scope.line,
            statement_count=count,
            lifetimes=self.compute_lifetimes(scope),
            mutating_count_opt=opt_mutating,
            mutating_count_cons=cons_mutating,
            mutating_ratio_opt=opt_mutating / count,
            mutating_ratio_cons=cons_mutating / count,
            diffusion_opt=opt_score,
            diffusion_cons=cons_score,
            diffusion_normalized_opt=self.normalize_score(opt_score, count, scope.name),
            diffusion_normalized_cons=self.normalize_score(cons_score, count, scope.name),
            contributions_opt=opt_contributions,
            contributions_cons=cons_contributions,
        )

    def analyze_unit(self, unit: SourceUnit) -> UnitAnalysis:
        """
        Raises:
            SourceSyntaxError: The unit does not parse
            NonTerminationError: Dataflow bound exceeded in some scope
        """
        analysis = UnitAnalysis()
        for scope in self.scope_parser.parse_scopes(unit):
            cfg = self.cfg_builder.build_cfg(scope)
            analysis.cfgs[(scope.name, scope.line)] = cfg
            try:
                analysis.records.append(self.analyze_scope(scope, cfg))
            except EmptyScopeError:
                logger.debug(f"{unit.path}: scope {scope.name} has no countable statements")
                analysis.empty_scopes.append(scope.name)
        return analysis
