"""
CFG Builder Module
Splits analyzable source into module and function scopes and builds a
control-flow graph of basic blocks for each scope
"""
import ast
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

from .models import BasicBlock, Cfg, EXIT_BLOCK, Scope, ScopeKind, SourceUnit, Statement, UnitKind
from .mutation_classifier import ModuleContext, MutationClassifier
from .spec_table import MutationSpecTable
from ..utils.error_handler import SourceSyntaxError

logger = logging.getLogger(__name__)

MODULE_SCOPE_NAME = "<module>"
FUNCTION_NODES = (ast.FunctionDef, ast.AsyncFunctionDef)


def _first_line(node: ast.AST) -> int:
    if type(node).__name__ == "match_case":
        return node.pattern.lineno
    return node.lineno


def statement_span(node: ast.AST) -> Tuple[int, int]:
    """Header range for compound statements, full range otherwise"""
    start = _first_line(node)
    children = getattr(node, "body", None) or getattr(node, "cases", None)
    if isinstance(children, list) and children:
        return start, max(start, _first_line(children[0]) - 1)
    return start, getattr(node, "end_lineno", None) or start


def scope_statement_nodes(body: List[ast.stmt]) -> List[ast.AST]:
    """
    Statements of one scope in source order: compound headers, their nested
    statements, except handlers and match cases; bodies of nested functions
    and classes are left to their own scopes
    """
    ordered: List[ast.AST] = []

    def visit(statements: List[ast.AST]) -> None:
        for node in statements:
            ordered.append(node)
            if isinstance(node, (ast.ClassDef, *FUNCTION_NODES)):
                continue
            visit(getattr(node, "body", None) or [])
            for handler in getattr(node, "handlers", None) or []:
                ordered.append(handler)
                visit(handler.body)
            for case in getattr(node, "cases", None) or []:
                ordered.append(case)
                visit(case.body)
            visit(getattr(node, "orelse", None) or [])
            visit(getattr(node, "finalbody", None) or [])

    visit(body)
    return ordered


class ScopeParser:
    """Parses a SourceUnit into scopes with classified statements"""

    def __init__(self, table: Optional[MutationSpecTable] = None):
        self.table = table or MutationSpecTable.load()

    def parse_scopes(self, unit: SourceUnit) -> List[Scope]:
        """
        One module scope plus one scope per function or method; lambdas and
        comprehensions stay inside their enclosing statement

        Raises:
            SourceSyntaxError: The unit's analyzable text does not parse
        """
        tree = self.parse_tree(unit)
        classifier = MutationClassifier(self.table, ModuleContext.from_tree(tree))

        end_line = max(1, len(unit.lines))
        scopes: List[Scope] = []
        module_scope = self._make_scope(unit, classifier, MODULE_SCOPE_NAME, ScopeKind.MODULE, tree.body,
                                        parent=None, params=(), line=1, end_line=end_line)
        scopes.append(module_scope)
        self._collect_nested(unit, classifier, tree.body, prefix="", parent=MODULE_SCOPE_NAME, scopes=scopes)
        logger.debug(f"{unit.path}: {len(scopes)} scopes")
        return scopes

    @staticmethod
    def parse_tree(unit: SourceUnit) -> ast.Module:
        try:
            return ast.parse(unit.text, filename=unit.path)
        except SyntaxError as e:
            raise SourceSyntaxError(f"{unit.path}:{e.lineno}: {e.msg}", lineno=e.lineno, file_path=unit.path)
        except ValueError as e:
            raise SourceSyntaxError(f"{unit.path}: {e}", file_path=unit.path)

    def _collect_nested(self, unit: SourceUnit, classifier: MutationClassifier, body: List[ast.stmt],
                        prefix: str, parent: str, scopes: List[Scope]) -> None:
        for node in scope_statement_nodes(body):
            if isinstance(node, FUNCTION_NODES):
                name = f"{prefix}{node.name}"
                scopes.append(self._make_scope(
                    unit, classifier, name, ScopeKind.FUNCTION, node.body, parent=parent,
                    params=tuple(MutationClassifier.param_names(node)),
                    line=node.lineno, end_line=node.end_lineno or node.lineno, enclosing=node,
                ))
                self._collect_nested(unit, classifier, node.body, prefix=f"{name}.", parent=name, scopes=scopes)
            elif isinstance(node, ast.ClassDef):
                # class bodies are not scopes; their methods are
                class_prefix = f"{prefix}{node.name}."
                self._collect_nested(unit, classifier, [n for n in node.body if isinstance(n, (ast.ClassDef, *FUNCTION_NODES))],
                                     prefix=class_prefix, parent=parent, scopes=scopes)

    def _make_scope(self, unit: SourceUnit, classifier: MutationClassifier, name: str, kind: ScopeKind,
                    body: List[ast.stmt], parent: Optional[str], params: Tuple[str, ...],
                    line: int, end_line: int, enclosing: Optional[ast.AST] = None) -> Scope:
        statements: List[Statement] = []
        node_ids: Dict[ast.AST, int] = {}
        for node in scope_statement_nodes(body):
            facts = classifier.describe_statement(node, enclosing)
            first = _first_line(node)
            placeholder = first in unit.placeholder_lines
            synthetic = not placeholder and unit.kind == UnitKind.NOTEBOOK and unit.is_synthetic(first)
            node_ids[node] = len(statements)
            statements.append(Statement(
                id=len(statements),
                line=first,
                span=statement_span(node),
                kind=facts.kind,
                reads=facts.reads,
                def_set=facts.def_set,
                update_set_opt=facts.update_set_opt,
                update_set_cons=facts.update_set_cons,
                placeholder=placeholder,
                synthetic=synthetic,
            ))
        return Scope(name=name, kind=kind, statements=tuple(statements), parent=parent, params=params,
                     line=line, end_line=end_line, body=tuple(body), node_ids=node_ids)


@dataclass
class _LoopContext:
    header: int
    breaks: List[int] = field(default_factory=list)


class CfgBuilder:
    """
    Builds block-level CFGs. Exception edges are over-approximated: the try
    statement and every block of the try body may jump to each handler.
    """

    def build_cfg(self, scope: Scope) -> Cfg:
        builder = _GraphBuilder(scope)
        outs = builder.visit_body(list(scope.body), [])
        if not builder.blocks:
            builder.new_block([])
            outs = [0]
        for block_id in outs:
            builder.add_edge(block_id, EXIT_BLOCK)

        graph = builder.graph
        entry = 0
        reachable = nx.descendants(graph, entry) | {entry}
        unreachable = frozenset(b for b in range(len(builder.blocks)) if b not in reachable)
        if unreachable:
            logger.debug(f"{scope.name}: unreachable blocks {sorted(unreachable)}")

        blocks = [BasicBlock(id=i, statement_ids=tuple(ids)) for i, ids in enumerate(builder.blocks)]
        return Cfg(scope=scope, blocks=blocks, graph=graph, entry=entry, exit=EXIT_BLOCK, unreachable=unreachable)

    @staticmethod
    def to_dot(cfg: Cfg) -> str:
        """Graphviz DOT text of a CFG"""
        def quote(text: str) -> str:
            return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'

        lines = [f"digraph {quote(cfg.scope.name)} {{", "  node [shape=box, fontname=monospace];"]
        for block in cfg.blocks:
            rows = [f"B{block.id}" + (" (entry)" if block.id == cfg.entry else "") + (" (unreachable)" if block.id in cfg.unreachable else "")]
            for statement_id in block.statement_ids:
                stmt = cfg.scope.statement(statement_id)
                updates = ",".join(sorted(stmt.update_set_cons))
                rows.append(f"L{stmt.line} {stmt.kind.value}" + (f" upd={updates}" if updates else ""))
            label = "\\l".join(r.replace("\\", "\\\\").replace('"', '\\"') for r in rows) + "\\l"
            lines.append(f'  B{block.id} [label="{label}"];')
        lines.append('  EXIT [shape=doublecircle, label="exit"];')
        for source, target in sorted(cfg.graph.edges):
            target_name = "EXIT" if target == cfg.exit else f"B{target}"
            lines.append(f"  B{source} -> {target_name};")
        lines.append("}")
        return "\n".join(lines) + "\n"


class _GraphBuilder:
    """Mutable state of one CFG construction"""

    def __init__(self, scope: Scope):
        self.scope = scope
        self.graph = nx.DiGraph()
        self.graph.add_node(EXIT_BLOCK)
        self.blocks: List[List[int]] = []
        self.closed: Set[int] = set()
        self.loops: List[_LoopContext] = []
        self.last_block: Optional[int] = None

    def new_block(self, preds: List[int]) -> int:
        block_id = len(self.blocks)
        self.blocks.append([])
        self.graph.add_node(block_id)
        for pred in preds:
            self.add_edge(pred, block_id)
        return block_id

    def add_edge(self, source: int, target: int) -> None:
        self.graph.add_edge(source, target)
        self.closed.add(source)

    def emit(self, node: ast.AST, preds: List[int], force_new: bool = False) -> int:
        """Append a statement to the open block it follows, or start a new block"""
        preds = sorted(set(preds))
        statement_id = self.scope.node_ids[node]
        if (not force_new and len(preds) == 1 and preds[0] == self.last_block
                and preds[0] not in self.closed):
            block_id = preds[0]
        else:
            block_id = self.new_block(preds)
        self.blocks[block_id].append(statement_id)
        self.last_block = block_id
        return block_id

    def visit_body(self, statements: List[ast.AST], preds: List[int]) -> List[int]:
        for node in statements:
            preds = self.visit(node, preds)
        return preds

    def visit(self, node: ast.AST, preds: List[int]) -> List[int]:
        kind = type(node).__name__
        if isinstance(node, ast.If):
            return self._visit_if(node, preds)
        if isinstance(node, (ast.While, ast.For, ast.AsyncFor)):
            return self._visit_loop(node, preds)
        if isinstance(node, ast.Try) or kind == "TryStar":
            return self._visit_try(node, preds)
        if isinstance(node, (ast.With, ast.AsyncWith)):
            block_id = self.emit(node, preds)
            return self.visit_body(node.body, [block_id])
        if kind == "Match":
            return self._visit_match(node, preds)
        if isinstance(node, (ast.Return, ast.Raise)):
            block_id = self.emit(node, preds)
            self.add_edge(block_id, EXIT_BLOCK)
            return []
        if isinstance(node, ast.Break) and self.loops:
            block_id = self.emit(node, preds)
            self.closed.add(block_id)
            self.loops[-1].breaks.append(block_id)
            return []
        if isinstance(node, ast.Continue) and self.loops:
            block_id = self.emit(node, preds)
            self.add_edge(block_id, self.loops[-1].header)
            return []
        return [self.emit(node, preds)]

    def _visit_if(self, node: ast.If, preds: List[int]) -> List[int]:
        header = self.emit(node, preds)
        self.closed.add(header)
        then_outs = self.visit_body(node.body, [header])
        else_outs = self.visit_body(node.orelse, [header]) if node.orelse else [header]
        return then_outs + else_outs

    def _visit_loop(self, node: ast.AST, preds: List[int]) -> List[int]:
        header = self.emit(node, preds, force_new=True)
        self.closed.add(header)
        context = _LoopContext(header)
        self.loops.append(context)
        for block_id in self.visit_body(node.body, [header]):
            self.add_edge(block_id, header)
        self.loops.pop()
        exits = self.visit_body(node.orelse, [header]) if node.orelse else [header]
        return exits + context.breaks

    def _visit_try(self, node: ast.AST, preds: List[int]) -> List[int]:
        try_block = self.emit(node, preds)
        self.closed.add(try_block)
        first_body_block = len(self.blocks)
        body_outs = self.visit_body(node.body, [try_block])
        body_blocks = list(range(first_body_block, len(self.blocks)))

        handler_outs: List[int] = []
        for handler in node.handlers:
            handler_block = self.emit(handler, [try_block] + body_blocks, force_new=True)
            handler_outs.extend(self.visit_body(handler.body, [handler_block]))

        else_outs = self.visit_body(node.orelse, body_outs) if node.orelse else body_outs
        if node.finalbody:
            return self.visit_body(node.finalbody, else_outs + handler_outs + body_blocks)
        return else_outs + handler_outs

    def _visit_match(self, node: ast.AST, preds: List[int]) -> List[int]:
        subject = self.emit(node, preds)
        self.closed.add(subject)
        outs: List[int] = []
        for case in node.cases:
            case_block = self.emit(case, [subject], force_new=True)
            outs.extend(self.visit_body(case.body, [case_block]))
        return outs + [subject]
