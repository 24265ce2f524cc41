"""
Clone Detector Module
Line-based near-miss clone detection at block and file granularity,
clone-class grouping, high-impact filtering and export of converted units
"""
import ast
import io
import logging
import os
import textwrap
import tokenize
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from difflib import SequenceMatcher
from enum import Enum
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .cfg_builder import FUNCTION_NODES, ScopeParser, scope_statement_nodes
from .models import SourceUnit, UnitKind
from ..utils.error_handler import ExportError
from ..utils.path_validator import PathValidator

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.7
DEFAULT_MIN_LINES = 10
DEFAULT_MIN_INSTANCES = 3
DEFAULT_MIN_STATEMENTS = 3
SIMILARITY_EPSILON = 1e-12
COMPOUND_NODES = (ast.If, ast.For, ast.AsyncFor, ast.While, ast.With, ast.AsyncWith, ast.Try,
                  ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)


class Granularity(str, Enum):
    BLOCK = "block"
    FILE = "file"


@dataclass(frozen=True)
class Fragment:
    """A code region of one unit; lines are analyzable-text line numbers"""
    unit: str
    granularity: Granularity
    start_line: int
    end_line: int
    normalized_lines: Tuple[str, ...]
    cells: Optional[Tuple[int, int]] = None

    @property
    def key(self) -> Tuple[str, int, int]:
        return self.unit, self.start_line, self.end_line

    @property
    def size(self) -> int:
        return len(self.normalized_lines)

    def overlaps(self, other: "Fragment") -> bool:
        return (self.unit == other.unit and self.start_line <= other.end_line
                and other.start_line <= self.end_line)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "unit": self.unit,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "normalized_line_count": self.size,
            "cells": list(self.cells) if self.cells is not None else None,
        }


@dataclass
class CloneClass:
    id: str
    granularity: Granularity
    instances: List[Fragment]
    min_similarity: float
    mean_similarity: float
    exact: bool

    @property
    def min_lines(self) -> int:
        return min(f.size for f in self.instances)

    @property
    def units(self) -> Set[str]:
        return {f.unit for f in self.instances}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "granularity": self.granularity.value,
            "instance_count": len(self.instances),
            "min_lines": self.min_lines,
            "min_similarity": self.min_similarity,
            "mean_similarity": self.mean_similarity,
            "exact": self.exact,
            "instances": [f.to_dict() for f in self.instances],
        }


@dataclass(frozen=True)
class LineDiff:
    """One differing region between a class's first instance and another instance"""
    tag: str
    base_start: int
    base_lines: Tuple[str, ...]
    instance_start: int
    instance_lines: Tuple[str, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tag": self.tag,
            "base_start": self.base_start,
            "base_lines": list(self.base_lines),
            "instance_start": self.instance_start,
            "instance_lines": list(self.instance_lines),
        }


@dataclass
class FileCloneResult:
    classes: List[CloneClass] = field(default_factory=list)
    diffs: Dict[str, Dict[str, List[LineDiff]]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classes": [c.to_dict() for c in self.classes],
            "diffs": {
                class_id: {unit: [d.to_dict() for d in unit_diffs] for unit, unit_diffs in sorted(per_unit.items())}
                for class_id, per_unit in sorted(self.diffs.items())
            },
        }


def normalize_code(lines: Iterable[str]) -> List[str]:
    """
    Drop comments and blank lines, collapse whitespace runs to one space and
    strip indentation; identifiers and literals are kept as written
    """
    text = textwrap.dedent("\n".join(lines))
    code_lines = text.split("\n")
    try:
        tokens = list(tokenize.generate_tokens(io.StringIO(text + "\n").readline))
        for token in reversed(tokens):
            if token.type == tokenize.COMMENT:
                row, column = token.start
                code_lines[row - 1] = code_lines[row - 1][:column]
    except (tokenize.TokenError, SyntaxError):
        code_lines = [line for line in code_lines if not line.lstrip().startswith("#")]
    return [" ".join(line.split()) for line in code_lines if line.strip()]


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence over whole lines (two-row dynamic programming)"""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for item in a:
        current = [0] * (len(b) + 1)
        for j, other in enumerate(b, start=1):
            if item == other:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def similarity(a, b) -> float:
    """|LCS| / max(|a|, |b|) over normalized lines; accepts Fragments or line lists"""
    lines_a = a.normalized_lines if isinstance(a, Fragment) else a
    lines_b = b.normalized_lines if isinstance(b, Fragment) else b
    longest = max(len(lines_a), len(lines_b))
    if longest == 0:
        return 0.0
    return lcs_length(lines_a, lines_b) / longest


class CloneDetector:
    """Near-miss clone detection over converted notebooks and scripts"""

    def __init__(self, threshold: float = DEFAULT_THRESHOLD, min_statements: int = DEFAULT_MIN_STATEMENTS):
        self.threshold = threshold
        self.min_statements = min_statements
        self.path_validator = PathValidator()

    def extract_blocks(self, unit: SourceUnit, min_statements: Optional[int] = None,
                       label: Optional[str] = None) -> List[Fragment]:
        """
        Candidate blocks: every module-level function body (cell functions
        included) and every maximal run of simple statements, each holding
        at least ``min_statements`` statements. Overlapping candidates are kept.

        Raises:
            SourceSyntaxError: The unit does not parse
        """
        min_statements = self.min_statements if min_statements is None else min_statements
        tree = ScopeParser.parse_tree(unit)
        ranges: Set[Tuple[int, int]] = set()

        for node in tree.body:
            if isinstance(node, FUNCTION_NODES):
                statements = [n for n in scope_statement_nodes(node.body)
                              if getattr(n, "lineno", None) not in unit.placeholder_lines]
                if statements and len(statements) >= min_statements:
                    ranges.add((node.body[0].lineno, node.end_lineno or node.body[-1].lineno))

        for run in self._simple_runs(tree):
            if len(run) >= min_statements:
                ranges.add((run[0].lineno, run[-1].end_lineno or run[-1].lineno))

        fragments = []
        for start, end in sorted(ranges):
            fragment = self._make_fragment(unit, Granularity.BLOCK, start, end, label)
            if fragment is not None:
                fragments.append(fragment)
        return fragments

    @staticmethod
    def _simple_runs(tree: ast.Module) -> List[List[ast.stmt]]:
        runs: List[List[ast.stmt]] = []

        def visit(statements: List[ast.stmt]) -> None:
            current: List[ast.stmt] = []
            for node in statements:
                if isinstance(node, COMPOUND_NODES) or type(node).__name__ in {"Match", "TryStar"}:
                    if current:
                        runs.append(current)
                    current = []
                    for name in ("body", "orelse", "finalbody"):
                        visit(getattr(node, name, None) or [])
                    for child in (getattr(node, "handlers", None) or []) + (getattr(node, "cases", None) or []):
                        visit(child.body)
                else:
                    current.append(node)
            if current:
                runs.append(current)

        visit(tree.body)
        return runs

    def extract_file_fragment(self, unit: SourceUnit, label: Optional[str] = None) -> Optional[Fragment]:
        """One fragment spanning the unit's non-synthetic lines; None when nothing remains after normalization"""
        line_count = len(unit.lines)
        if line_count == 0:
            return None
        return self._make_fragment(unit, Granularity.FILE, 1, line_count, label)

    def _make_fragment(self, unit: SourceUnit, granularity: Granularity, start: int, end: int,
                       label: Optional[str]) -> Optional[Fragment]:
        text_lines = unit.lines
        numbers = [n for n in range(start, end + 1) if not unit.is_synthetic(n)]
        normalized = normalize_code(text_lines[n - 1] for n in numbers if n - 1 < len(text_lines))
        if not normalized:
            return None
        cells = None
        if unit.kind == UnitKind.NOTEBOOK and numbers:
            cells = (unit.origin(numbers[0]).cell, unit.origin(numbers[-1]).cell)
        return Fragment(unit=label or unit.path, granularity=granularity, start_line=start, end_line=end,
                        normalized_lines=tuple(normalized), cells=cells)

    def detect_clone_classes(self, fragments: Sequence[Fragment], threshold: Optional[float] = None) -> List[CloneClass]:
        """
        Link fragment pairs with similarity >= threshold and group the links
        into connected components; overlapping fragments of one unit are never
        linked. Class ids follow the sorted order of member fragments.
        """
        threshold = self.threshold if threshold is None else threshold
        ordered = sorted({f.key: f for f in fragments}.values(), key=lambda f: f.key)
        graph = nx.Graph()
        scores: Dict[Tuple[int, int], float] = {}

        for i, j in self._candidate_pairs(ordered, threshold):
            a, b = ordered[i], ordered[j]
            if a.overlaps(b):
                continue
            score = similarity(a, b)
            scores[(i, j)] = score
            if score >= threshold - SIMILARITY_EPSILON:
                graph.add_edge(i, j)

        components = [sorted(component) for component in nx.connected_components(graph) if len(component) >= 2]
        components.sort(key=lambda members: ordered[members[0]].key)

        classes = []
        for number, members in enumerate(components, start=1):
            instances = [ordered[m] for m in members]
            pair_scores = [scores[(i, j)] if (i, j) in scores else similarity(ordered[i], ordered[j])
                           for i, j in combinations(members, 2)]
            granularity = instances[0].granularity
            classes.append(CloneClass(
                id=f"{granularity.value}-{number:04d}",
                granularity=granularity,
                instances=instances,
                min_similarity=min(pair_scores),
                mean_similarity=sum(pair_scores) / len(pair_scores),
                exact=len({f.normalized_lines for f in instances}) == 1,
            ))
        logger.debug(f"{len(ordered)} fragments, {graph.number_of_edges()} links, {len(classes)} classes")
        return classes

    @staticmethod
    def _candidate_pairs(fragments: Sequence[Fragment], threshold: float) -> Iterable[Tuple[int, int]]:
        """
        Pairs whose shared-line multiset can still reach the threshold; the
        multiset intersection bounds the LCS from above
        """
        counts = [Counter(f.normalized_lines) for f in fragments]
        postings: Dict[str, List[int]] = defaultdict(list)
        for index, counter in enumerate(counts):
            for line in counter:
                postings[line].append(index)

        for i, counter in enumerate(counts):
            shared: Dict[int, int] = defaultdict(int)
            for line, count in counter.items():
                for j in postings[line]:
                    if j > i:
                        shared[j] += min(count, counts[j][line])
            size_i = fragments[i].size
            for j in sorted(shared):
                longest = max(size_i, fragments[j].size)
                if shared[j] >= threshold * longest - SIMILARITY_EPSILON:
                    yield i, j

    @staticmethod
    def filter_high_impact(classes: Sequence[CloneClass], min_lines: int = DEFAULT_MIN_LINES,
                           min_instances: int = DEFAULT_MIN_INSTANCES,
                           file_classes: Optional[Sequence[CloneClass]] = None) -> List[CloneClass]:
        """
        Keep classes with at least ``min_instances`` instances whose smallest
        instance has at least ``min_lines`` normalized lines. With file-level
        classes given, classes lying entirely in file-cloned units are dropped.
        """
        file_cloned: Set[str] = set()
        for file_class in file_classes or []:
            file_cloned |= file_class.units

        kept = []
        for clone_class in classes:
            if len(clone_class.instances) < min_instances or clone_class.min_lines < min_lines:
                continue
            if file_cloned and clone_class.units <= file_cloned:
                continue
            kept.append(clone_class)
        return kept

    def detect_file_clones(self, units: Sequence[SourceUnit], threshold: Optional[float] = None,
                           labels: Optional[Sequence[str]] = None) -> FileCloneResult:
        """
        File-granularity classes plus, per class, the differing line regions
        of every instance against the first instance
        """
        labels = list(labels) if labels is not None else [u.path for u in units]
        fragments = [f for f in (self.extract_file_fragment(u, label) for u, label in zip(units, labels)) if f]
        result = FileCloneResult(classes=self.detect_clone_classes(fragments, threshold))

        for clone_class in result.classes:
            base = clone_class.instances[0]
            per_unit: Dict[str, List[LineDiff]] = {}
            for instance in clone_class.instances[1:]:
                per_unit[instance.unit] = self.line_diffs(base.normalized_lines, instance.normalized_lines)
            result.diffs[clone_class.id] = per_unit
        return result

    @staticmethod
    def line_diffs(base: Sequence[str], other: Sequence[str]) -> List[LineDiff]:
        matcher = SequenceMatcher(None, list(base), list(other), autojunk=False)
        return [
            LineDiff(tag=tag, base_start=i1 + 1, base_lines=tuple(base[i1:i2]),
                     instance_start=j1 + 1, instance_lines=tuple(other[j1:j2]))
            for tag, i1, i2, j1, j2 in matcher.get_opcodes()
            if tag != "equal"
        ]

    def export_units(self, units: Sequence[SourceUnit], output_dir: str) -> List[str]:
        """
        Write every converted unit to ``<output_dir>/<stem>.py`` for external
        clone detectors; colliding stems get a ``_<n>`` suffix

        Raises:
            ExportError: The directory or a file cannot be written
        """
        self.path_validator.ensure_output_directory(output_dir, "nicad")

        written: List[str] = []
        used: Set[str] = set()
        for unit in sorted(units, key=lambda u: u.path):
            stem = os.path.splitext(os.path.basename(unit.path))[0]
            name = stem
            suffix = 1
            while name in used:
                name = f"{stem}_{suffix}"
                suffix += 1
            used.add(name)
            target = os.path.join(output_dir, f"{name}.py")
            try:
                with open(target, "w", encoding="utf-8") as f:
                    f.write(unit.text)
            except OSError as e:
                raise ExportError(f"Cannot write {target}: {e}", export_type="nicad", output_file=target)
            written.append(target)
        logger.info(f"Exported {len(written)} units to {output_dir}")
        return written
