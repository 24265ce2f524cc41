"""
Mutation Classifier Module
Computes DEF and UPDATE sets of statements from syntax, one-level analysis
of functions defined in the same module, the library spec table and method
name heuristics, under the optimistic and conservative policies
"""
import ast
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple, Union

from .models import Policy, SourceUnit, StatementKind
from .spec_table import BUILTINS_LIBRARY, EffectKind, MutationSpecTable
from ..utils.error_handler import SourceSyntaxError

logger = logging.getLogger(__name__)

FunctionNode = Union[ast.FunctionDef, ast.AsyncFunctionDef]
SCOPE_NODES = (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)
COMPREHENSION_NODES = (ast.ListComp, ast.SetComp, ast.DictComp, ast.GeneratorExp)
CAPTURE_PATTERNS = {"MatchAs", "MatchStar"}


class Resolution(str, Enum):
    LOCAL_BODY = "local_body"
    SPEC_TABLE = "spec_table"
    HEURISTIC = "heuristic"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class CallEffect:
    resolution: Resolution
    mutated: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class StatementFacts:
    """Everything the scope parser records about one statement"""
    kind: StatementKind
    reads: FrozenSet[str]
    def_set: FrozenSet[str]
    update_set_opt: FrozenSet[str]
    update_set_cons: FrozenSet[str]


@dataclass
class ModuleContext:
    """
    Module-wide facts call resolution depends on.

    ``imports`` maps every imported binding to its qualified name
    (``np`` -> ``numpy``, ``tts`` -> ``sklearn.model_selection.train_test_split``);
    ``functions`` holds every non-method function definition by name.
    Import bindings are also recorded per scope: ``module_imports`` outside
    any function, ``function_imports`` per function (its own body plus the
    bodies of enclosing functions).
    """
    imports: Dict[str, str] = field(default_factory=dict)
    functions: Dict[str, FunctionNode] = field(default_factory=dict)
    module_imports: FrozenSet[str] = frozenset()
    function_imports: Dict[int, FrozenSet[str]] = field(default_factory=dict)
    # keeps the nodes behind the id() keys alive
    tree: Optional[ast.AST] = field(default=None, repr=False)

    @classmethod
    def from_tree(cls, tree: ast.AST) -> "ModuleContext":
        context = cls()
        methods = {id(child) for node in ast.walk(tree) if isinstance(node, ast.ClassDef) for child in node.body}
        for node in ast.walk(tree):
            if isinstance(node, ast.Import):
                for alias in node.names:
                    if alias.asname:
                        context.imports[alias.asname] = alias.name
                    else:
                        top = alias.name.split(".")[0]
                        context.imports[top] = top
            elif isinstance(node, ast.ImportFrom):
                if node.level or not node.module:
                    continue
                for alias in node.names:
                    if alias.name != "*":
                        context.imports[alias.asname or alias.name] = f"{node.module}.{alias.name}"
            elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and id(node) not in methods:
                context.functions[node.name] = node
        context.tree = tree
        context._collect_scoped_imports(tree)
        return context

    def _collect_scoped_imports(self, tree: ast.AST) -> None:
        owned: Dict[Optional[int], Set[str]] = {None: set()}
        parents: Dict[int, Optional[int]] = {}
        pending: List[Tuple[ast.AST, Optional[int]]] = [(tree, None)]
        while pending:
            node, owner = pending.pop()
            for child in ast.iter_child_nodes(node):
                if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
                    parents[id(child)] = owner
                    owned[id(child)] = set()
                    pending.append((child, id(child)))
                else:
                    owned[owner].update(import_bindings(child))
                    pending.append((child, owner))

        self.module_imports = frozenset(owned[None])
        for function_id in parents:
            names: Set[str] = set()
            current: Optional[int] = function_id
            while current is not None:
                names |= owned[current]
                current = parents[current]
            self.function_imports[function_id] = frozenset(names)

    def aliases_for(self, function: Optional[FunctionNode] = None) -> FrozenSet[str]:
        """Import bindings visible in the module scope or inside ``function``"""
        if function is None:
            return self.module_imports
        return self.module_imports | self.function_imports.get(id(function), frozenset())


def import_bindings(node: ast.AST) -> List[str]:
    """Names an absolute import statement binds (``import a.b`` binds ``a``)"""
    if isinstance(node, ast.Import):
        return [alias.asname or alias.name.split(".")[0] for alias in node.names]
    if isinstance(node, ast.ImportFrom) and not node.level and node.module:
        return [alias.asname or alias.name for alias in node.names if alias.name != "*"]
    return []


def root_name(expr: Optional[ast.AST]) -> Optional[str]:
    """Root variable of a Name/Attribute/Subscript/Starred chain (``a.b[0].c`` -> ``a``)"""
    while isinstance(expr, (ast.Attribute, ast.Subscript, ast.Starred)):
        expr = expr.value
    return expr.id if isinstance(expr, ast.Name) else None


def _loose_root(expr: Optional[ast.AST]) -> Optional[str]:
    # also follows call results: df.dropna().reset_index -> df
    while isinstance(expr, (ast.Attribute, ast.Subscript, ast.Starred, ast.Call)):
        expr = expr.func if isinstance(expr, ast.Call) else expr.value
    return expr.id if isinstance(expr, ast.Name) else None


def dotted_name(expr: ast.AST) -> Optional[List[str]]:
    parts: List[str] = []
    while isinstance(expr, ast.Attribute):
        parts.append(expr.attr)
        expr = expr.value
    if not isinstance(expr, ast.Name):
        return None
    parts.append(expr.id)
    return list(reversed(parts))


def statement_expressions(node: ast.AST) -> List[ast.AST]:
    """
    Expressions a statement evaluates itself; bodies of compound statements
    belong to their own statements
    """
    if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
        args = node.args
        return [*node.decorator_list, *args.defaults, *(d for d in args.kw_defaults if d is not None)]
    if isinstance(node, ast.ClassDef):
        return [*node.decorator_list, *node.bases, *(k.value for k in node.keywords)]
    if isinstance(node, (ast.If, ast.While)):
        return [node.test]
    if isinstance(node, (ast.For, ast.AsyncFor)):
        return [node.target, node.iter]
    if isinstance(node, (ast.With, ast.AsyncWith)):
        return [part for item in node.items for part in (item.context_expr, item.optional_vars) if part is not None]
    if isinstance(node, ast.ExceptHandler):
        return [node.type] if node.type is not None else []
    if isinstance(node, ast.AnnAssign):
        return [node.target] + ([node.value] if node.value is not None else [])
    if isinstance(node, ast.Assign):
        return [*node.targets, node.value]
    if type(node).__name__ == "Match":
        return [node.subject]
    if type(node).__name__ == "match_case":
        return [node.pattern] + ([node.guard] if node.guard is not None else [])
    if isinstance(node, (ast.Try, ast.Global, ast.Nonlocal, ast.Pass, ast.Break, ast.Continue, ast.Import, ast.ImportFrom)):
        return []
    if type(node).__name__ == "TryStar":
        return []
    return [node]


def _walk(nodes: Iterable[ast.AST]) -> Iterator[ast.AST]:
    for node in nodes:
        yield from ast.walk(node)


def _flatten_targets(targets: Iterable[ast.AST]) -> Iterator[ast.AST]:
    for target in targets:
        if isinstance(target, (ast.Tuple, ast.List)):
            yield from _flatten_targets(target.elts)
        elif isinstance(target, ast.Starred):
            yield from _flatten_targets([target.value])
        else:
            yield target


class MutationClassifier:
    """DEF/UPDATE classification of the statements of one module"""

    def __init__(self, table: MutationSpecTable, context: Optional[ModuleContext] = None):
        self.table = table
        self.context = context or ModuleContext()
        self._local_cache: Dict[Tuple[str, Policy], FrozenSet[str]] = {}

    @classmethod
    def for_unit(cls, unit: SourceUnit, table: MutationSpecTable) -> "MutationClassifier":
        """
        Raises:
            SourceSyntaxError: The unit's analyzable text does not parse
        """
        try:
            tree = ast.parse(unit.text, filename=unit.path)
        except SyntaxError as e:
            raise SourceSyntaxError(f"{unit.path}: {e.msg}", lineno=e.lineno, file_path=unit.path)
        return cls(table, ModuleContext.from_tree(tree))

    def describe_statement(self, node: ast.AST, enclosing: Optional[FunctionNode] = None) -> StatementFacts:
        def_set, update_opt = self.classify_statement(node, Policy.OPTIMISTIC, enclosing)
        _, update_cons = self.classify_statement(node, Policy.CONSERVATIVE, enclosing)
        return StatementFacts(
            kind=self.statement_kind(node),
            reads=self.statement_reads(node),
            def_set=def_set,
            update_set_opt=update_opt,
            update_set_cons=update_cons,
        )

    def classify_statement(self, node: ast.AST, policy: Policy,
                           enclosing: Optional[FunctionNode] = None) -> Tuple[FrozenSet[str], FrozenSet[str]]:
        """
        Args:
            node: Statement node (ExceptHandler and match_case included)
            policy: How unresolved calls are treated
            enclosing: Function whose body holds the statement (None at module level)

        Returns:
            (def_set, update_set); a name defined by the statement is never
            also in its update set
        """
        return self._classify(node, Policy(policy), local_bodies=True, enclosing=enclosing)

    def _classify(self, node: ast.AST, policy: Policy, local_bodies: bool, rebinding_augassign: bool = True,
                  enclosing: Optional[FunctionNode] = None) -> Tuple[FrozenSet[str], FrozenSet[str]]:
        defs: Set[str] = set()
        updates: Set[str] = set()

        if isinstance(node, ast.Assign):
            for target in node.targets:
                self._bind_target(target, defs, updates)
        elif isinstance(node, ast.AnnAssign):
            if node.value is not None:
                self._bind_target(node.target, defs, updates)
        elif isinstance(node, ast.AugAssign):
            if isinstance(node.target, ast.Name):
                if rebinding_augassign:
                    updates.add(node.target.id)
            else:
                self._add_root(node.target, updates)
        elif isinstance(node, (ast.For, ast.AsyncFor)):
            self._bind_target(node.target, defs, updates)
        elif isinstance(node, (ast.With, ast.AsyncWith)):
            for item in node.items:
                if item.optional_vars is not None:
                    self._bind_target(item.optional_vars, defs, updates)
        elif isinstance(node, ast.Import):
            for alias in node.names:
                defs.add(alias.asname or alias.name.split(".")[0])
        elif isinstance(node, ast.ImportFrom):
            defs.update(alias.asname or alias.name for alias in node.names if alias.name != "*")
        elif isinstance(node, SCOPE_NODES):
            defs.add(node.name)
        elif isinstance(node, ast.Delete):
            for target in node.targets:
                if not isinstance(target, ast.Name):
                    self._add_root(target, updates)
        elif isinstance(node, ast.ExceptHandler):
            if node.name:
                defs.add(node.name)
        elif type(node).__name__ == "match_case":
            defs.update(self._pattern_captures(node.pattern))

        expressions = statement_expressions(node)
        for sub in _walk(expressions):
            if isinstance(sub, ast.NamedExpr):
                defs.add(sub.target.id)
            elif isinstance(sub, ast.Call):
                updates |= self._resolve(sub, policy, local_bodies, enclosing).mutated

        updates -= self.context.aliases_for(enclosing)
        updates -= defs
        return frozenset(defs), frozenset(updates)

    def _bind_target(self, target: ast.AST, defs: Set[str], updates: Set[str]) -> None:
        if isinstance(target, ast.Name):
            defs.add(target.id)
        elif isinstance(target, (ast.Tuple, ast.List)):
            for element in target.elts:
                self._bind_target(element, defs, updates)
        elif isinstance(target, ast.Starred):
            self._bind_target(target.value, defs, updates)
        else:
            self._add_root(target, updates)

    @staticmethod
    def _add_root(expr: ast.AST, names: Set[str]) -> None:
        name = root_name(expr)
        if name:
            names.add(name)

    @staticmethod
    def _pattern_captures(pattern: ast.AST) -> Set[str]:
        captures = set()
        for sub in ast.walk(pattern):
            kind = type(sub).__name__
            if kind in CAPTURE_PATTERNS and getattr(sub, "name", None):
                captures.add(sub.name)
            elif kind == "MatchMapping" and getattr(sub, "rest", None):
                captures.add(sub.rest)
        return captures

    def resolve_call_effect(self, call: ast.Call, policy: Policy,
                            enclosing: Optional[FunctionNode] = None) -> CallEffect:
        """
        Resolution order: function defined in the same module (body analysed
        one level deep), import-traced spec table entry or builtin, method
        name heuristic, unknown (resolved by policy)
        """
        return self._resolve(call, Policy(policy), local_bodies=True, enclosing=enclosing)

    def _resolve(self, call: ast.Call, policy: Policy, local_bodies: bool,
                 enclosing: Optional[FunctionNode] = None) -> CallEffect:
        func = call.func
        aliases = self.context.aliases_for(enclosing)

        if (local_bodies and isinstance(func, ast.Name) and func.id in self.context.functions
                and func.id not in aliases):
            mutated_params = self._local_body_mutations(func.id, policy)
            return CallEffect(Resolution.LOCAL_BODY, self._map_params(call, self.context.functions[func.id], mutated_params))

        parts = dotted_name(func)
        if parts:
            effect = None
            if parts[0] in self.context.imports:
                qualified = ".".join([self.context.imports[parts[0]], *parts[1:]]).split(".")
                if len(qualified) > 1:
                    effect = self.table.lookup(qualified[0], ".".join(qualified[1:]))
            elif len(parts) == 1 and parts[0] not in self.context.functions:
                effect = self.table.lookup(BUILTINS_LIBRARY, parts[0])
            if effect is not None:
                return CallEffect(Resolution.SPEC_TABLE, self._apply_effect(call, effect) - aliases)

        if isinstance(func, ast.Attribute) and _loose_root(func) not in aliases:
            if func.attr in self.table.heuristic_mutators:
                receiver = root_name(func.value)
                mutated = {receiver} if receiver else set()
                return CallEffect(Resolution.HEURISTIC, frozenset(mutated) - aliases)
            if func.attr in self.table.heuristic_pure:
                return CallEffect(Resolution.HEURISTIC)

        if policy == Policy.OPTIMISTIC:
            return CallEffect(Resolution.UNKNOWN)
        return CallEffect(Resolution.UNKNOWN, self._all_call_roots(call) - aliases)

    @staticmethod
    def _apply_effect(call: ast.Call, effect) -> FrozenSet[str]:
        if effect.kind == EffectKind.PURE:
            return frozenset()
        if effect.kind == EffectKind.RECEIVER:
            receiver = root_name(call.func.value) if isinstance(call.func, ast.Attribute) else None
            return frozenset({receiver} if receiver else ())
        names = set()
        for index in effect.arg_indices:
            if index < len(call.args):
                name = root_name(call.args[index])
                if name:
                    names.add(name)
        return frozenset(names)

    @staticmethod
    def _all_call_roots(call: ast.Call) -> FrozenSet[str]:
        names = set()
        for arg in [*call.args, *(k.value for k in call.keywords)]:
            name = root_name(arg)
            if name:
                names.add(name)
        if isinstance(call.func, ast.Attribute):
            receiver = _loose_root(call.func.value)
            if receiver:
                names.add(receiver)
        return frozenset(names)

    def _local_body_mutations(self, function_name: str, policy: Policy) -> FrozenSet[str]:
        """Parameters the function body mutates; further calls are not followed into"""
        key = (function_name, policy)
        if key not in self._local_cache:
            fn = self.context.functions[function_name]
            params = set(self.param_names(fn))
            mutated: Set[str] = set()
            for stmt in self._body_statements(fn.body):
                # a bare `param += x` rebinds the local name
                _, updates = self._classify(stmt, policy, local_bodies=False, rebinding_augassign=False, enclosing=fn)
                mutated |= updates & params
            self._local_cache[key] = frozenset(mutated)
            logger.debug(f"Local body of {function_name} ({policy.value}) mutates {sorted(mutated)}")
        return self._local_cache[key]

    @staticmethod
    def _body_statements(body: List[ast.stmt]) -> Iterator[ast.AST]:
        pending: List[ast.AST] = list(reversed(body))
        while pending:
            node = pending.pop()
            yield node
            if isinstance(node, SCOPE_NODES):
                continue
            children = []
            for name in ("body", "orelse", "finalbody", "handlers", "cases"):
                children.extend(getattr(node, name, None) or [])
            pending.extend(reversed(children))

    @staticmethod
    def param_names(fn: FunctionNode) -> List[str]:
        args = fn.args
        names = [a.arg for a in getattr(args, "posonlyargs", [])] + [a.arg for a in args.args]
        if args.vararg:
            names.append(args.vararg.arg)
        names.extend(a.arg for a in args.kwonlyargs)
        if args.kwarg:
            names.append(args.kwarg.arg)
        return names

    @staticmethod
    def _map_params(call: ast.Call, fn: FunctionNode, mutated_params: FrozenSet[str]) -> FrozenSet[str]:
        """Argument variables bound to mutated parameters at this call site"""
        if not mutated_params:
            return frozenset()
        args = fn.args
        positional = [a.arg for a in getattr(args, "posonlyargs", [])] + [a.arg for a in args.args]
        keyword_params = set(a.arg for a in args.args) | {a.arg for a in args.kwonlyargs}
        names = set()

        for index, arg in enumerate(call.args):
            if isinstance(arg, ast.Starred):
                break
            if index < len(positional):
                param = positional[index]
            elif args.vararg:
                param = args.vararg.arg
            else:
                break
            if param in mutated_params and root_name(arg):
                names.add(root_name(arg))

        for keyword in call.keywords:
            if keyword.arg is None:
                continue
            if keyword.arg in keyword_params:
                param = keyword.arg
            elif args.kwarg:
                param = args.kwarg.arg
            else:
                continue
            if param in mutated_params and root_name(keyword.value):
                names.add(root_name(keyword.value))
        return frozenset(names)

    @staticmethod
    def statement_kind(node: ast.AST) -> StatementKind:
        if isinstance(node, (ast.Assign, ast.AnnAssign)):
            targets = node.targets if isinstance(node, ast.Assign) else [node.target]
            flat = list(_flatten_targets(targets))
            if any(isinstance(t, ast.Subscript) for t in flat):
                return StatementKind.SUBSCRIPT_ASSIGN
            if any(isinstance(t, ast.Attribute) for t in flat):
                return StatementKind.ATTRIBUTE_ASSIGN
            return StatementKind.ASSIGN
        if isinstance(node, ast.AugAssign):
            return StatementKind.AUG_ASSIGN
        if isinstance(node, ast.Expr) and isinstance(node.value, (ast.Call, ast.Await)):
            return StatementKind.CALL_STMT
        if isinstance(node, ast.Return):
            return StatementKind.RETURN
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            return StatementKind.IMPORT
        if isinstance(node, (ast.If, ast.While, ast.For, ast.AsyncFor, ast.With, ast.AsyncWith, ast.Try,
                             ast.ExceptHandler, ast.Break, ast.Continue, ast.Raise)):
            return StatementKind.CONTROL
        if type(node).__name__ in {"Match", "match_case", "TryStar"}:
            return StatementKind.CONTROL
        return StatementKind.OTHER

    @staticmethod
    def statement_reads(node: ast.AST) -> FrozenSet[str]:
        """Names the statement loads; names bound by its lambdas and comprehensions are left out"""
        expressions = statement_expressions(node)
        loads: Set[str] = set()
        inner_bound: Set[str] = set()
        for sub in _walk(expressions):
            if isinstance(sub, ast.Name) and isinstance(sub.ctx, (ast.Load, ast.Del)):
                loads.add(sub.id)
            elif isinstance(sub, COMPREHENSION_NODES):
                for generator in sub.generators:
                    inner_bound.update(n.id for n in ast.walk(generator.target) if isinstance(n, ast.Name))
            elif isinstance(sub, ast.Lambda):
                inner_bound.update(MutationClassifier.param_names(sub))
        if isinstance(node, ast.AugAssign) and isinstance(node.target, ast.Name):
            loads.add(node.target.id)
        if isinstance(node, ast.Delete):
            loads.update(t.id for t in node.targets if isinstance(t, ast.Name))
        return frozenset(loads - inner_bound)
