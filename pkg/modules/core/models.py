"""
Domain Models
Parsed sources, scopes, statements and control-flow graphs shared by the analyses
"""
import ast
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Set, Tuple

import networkx as nx


class UnitKind(str, Enum):
    SCRIPT = "script"
    NOTEBOOK = "notebook"


class CellKind(str, Enum):
    CODE = "code"
    MARKDOWN = "markdown"
    RAW = "raw"


class ScopeKind(str, Enum):
    MODULE = "module"
    FUNCTION = "function"


class StatementKind(str, Enum):
    ASSIGN = "assign"
    AUG_ASSIGN = "aug_assign"
    SUBSCRIPT_ASSIGN = "subscript_assign"
    ATTRIBUTE_ASSIGN = "attribute_assign"
    CALL_STMT = "call_stmt"
    CONTROL = "control"
    RETURN = "return"
    IMPORT = "import"
    OTHER = "other"


class Policy(str, Enum):
    """How calls that cannot be resolved are treated"""
    OPTIMISTIC = "optimistic"
    CONSERVATIVE = "conservative"


class LineOrigin(NamedTuple):
    """Position of an analyzable-text line inside the original file (0-based)"""
    cell: int
    line: int


@dataclass(frozen=True)
class Cell:
    """One notebook cell; scripts carry a single synthetic code cell"""
    index: int
    kind: CellKind
    source: Tuple[str, ...]
    outputs_present: bool = False

    @property
    def text(self) -> str:
        return "\n".join(self.source)


def split_source_lines(text: str) -> List[str]:
    """
    Split on line breaks the tokenizer counts (\\n, \\r\\n, \\r) so indexes match
    ast line numbers; form feeds and other Unicode separators stay inside lines
    """
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


@dataclass(frozen=True)
class SourceUnit:
    """
    A loaded script or notebook.

    ``text`` is the analyzable Python source (verbatim for scripts, the
    cell-per-function conversion for notebooks). ``line_map`` maps 1-based
    lines of ``text`` back to cells; lines missing from it are synthetic
    (function headers and placeholders emitted by the conversion).
    """
    path: str
    kind: UnitKind
    cells: Tuple[Cell, ...]
    text: str
    line_map: Mapping[int, LineOrigin]
    language: str = "python"
    placeholder_lines: FrozenSet[int] = frozenset()

    @property
    def lines(self) -> List[str]:
        return split_source_lines(self.text)

    @property
    def code_cells(self) -> Tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.kind == CellKind.CODE)

    def origin(self, line: int) -> Optional[LineOrigin]:
        return self.line_map.get(line)

    def is_synthetic(self, line: int) -> bool:
        return line not in self.line_map


@dataclass(frozen=True)
class Statement:
    """A statement of a scope with its DEF and UPDATE sets under both policies"""
    id: int
    line: int
    span: Tuple[int, int]
    kind: StatementKind
    reads: FrozenSet[str] = frozenset()
    def_set: FrozenSet[str] = frozenset()
    update_set_opt: FrozenSet[str] = frozenset()
    update_set_cons: FrozenSet[str] = frozenset()
    placeholder: bool = False
    synthetic: bool = False

    def update_set(self, policy: Policy) -> FrozenSet[str]:
        if Policy(policy) == Policy.OPTIMISTIC:
            return self.update_set_opt
        return self.update_set_cons

    @property
    def countable(self) -> bool:
        """Placeholder and synthetic statements stay out of every metric"""
        return not (self.placeholder or self.synthetic)


@dataclass
class Scope:
    """A module or function scope with its statements in source order"""
    name: str
    kind: ScopeKind
    statements: Tuple[Statement, ...]
    parent: Optional[str] = None
    params: Tuple[str, ...] = ()
    line: int = 1
    end_line: int = 1
    body: Tuple[ast.stmt, ...] = field(default=(), repr=False, compare=False)
    node_ids: Dict[ast.AST, int] = field(default_factory=dict, repr=False, compare=False)

    def statement(self, statement_id: int) -> Statement:
        return self.statements[statement_id]

    @property
    def countable_statements(self) -> Tuple[Statement, ...]:
        return tuple(s for s in self.statements if s.countable)

    def variables(self) -> Set[str]:
        """Names tracked by the analyses: parameters and every DEF/UPDATE target"""
        names = set(self.params)
        for stmt in self.statements:
            if stmt.countable:
                names |= stmt.def_set | stmt.update_set_cons
        return names


@dataclass(frozen=True)
class BasicBlock:
    id: int
    statement_ids: Tuple[int, ...]


EXIT_BLOCK = -1


@dataclass
class Cfg:
    """Control-flow graph of one scope; ``graph`` nodes are block ids plus EXIT_BLOCK"""
    scope: Scope
    blocks: List[BasicBlock]
    graph: nx.DiGraph
    entry: int
    exit: int = EXIT_BLOCK
    unreachable: FrozenSet[int] = frozenset()

    @property
    def edges(self) -> Set[Tuple[int, int]]:
        return set(self.graph.edges)

    @property
    def internal_edges(self) -> Set[Tuple[int, int]]:
        """Edges between statement blocks (edges into EXIT_BLOCK left out)"""
        return {(a, b) for a, b in self.graph.edges if b != self.exit}

    def block(self, block_id: int) -> BasicBlock:
        return self.blocks[block_id]

    def predecessors(self, block_id: int) -> List[int]:
        return sorted(self.graph.predecessors(block_id))

    def successors(self, block_id: int) -> List[int]:
        return sorted(self.graph.successors(block_id))

    def block_of(self, statement_id: int) -> int:
        for block in self.blocks:
            if statement_id in block.statement_ids:
                return block.id
        raise KeyError(statement_id)
