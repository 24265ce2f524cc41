"""
Notebook Parser Module
Loads Python scripts and Jupyter notebooks into SourceUnits and converts
notebooks into analyzable scripts (one function per code cell)
"""
import ast
import dataclasses
import io
import json
import logging
import tokenize
from typing import Dict, FrozenSet, List, NamedTuple, Sequence, Tuple

import nbformat

from .models import Cell, CellKind, LineOrigin, SourceUnit, UnitKind, split_source_lines
from ..utils.error_handler import MalformedContainerError, SourceReadError, UnsupportedKernelError
from ..utils.path_validator import PathValidator

CELL_FUNCTION_TEMPLATE = "cell_{index:04d}"
BODY_INDENT = "    "
PLACEHOLDER_STATEMENT = "pass"
DIRECTIVE_PREFIXES = ("%", "!")
PYTHON_LANGUAGES = {"python", "python2", "python3", "ipython", "ipython3"}


class ConvertedScript(NamedTuple):
    text: str
    line_map: Dict[int, LineOrigin]
    placeholder_lines: FrozenSet[int]


def cell_function_name(index: int) -> str:
    return CELL_FUNCTION_TEMPLATE.format(index=index)


def is_directive(line: str) -> bool:
    """Magics (%, %%) and shell escapes (!) start with a marker character"""
    return line.lstrip().startswith(DIRECTIVE_PREFIXES)


def directive_lines(source: Sequence[str]) -> FrozenSet[int]:
    """
    Indices of the cell lines that are magics or shell escapes.

    Only a line that starts a logical line can be one; continuation lines
    inside brackets, strings or after a backslash stay Python even when they
    begin with ``%`` or ``!`` (``    % n``, ``    != b``).
    """
    directives = set()
    pending: List[str] = []
    for index, line in enumerate(source):
        if not pending and is_directive(line):
            directives.add(index)
            continue
        pending.append(line)
        if not _continues(pending):
            pending = []
    return frozenset(directives)


def _continues(lines: List[str]) -> bool:
    """Whether the logical line begun in ``lines`` is still open"""
    try:
        for _ in tokenize.generate_tokens(io.StringIO("\n".join(lines) + "\n").readline):
            pass
    except tokenize.TokenError as e:
        message = str(e.args[0]) if e.args else ""
        return "EOF" in message or "triple-quoted" in message
    except SyntaxError:
        return False
    return False


def directive_comment(line: str) -> str:
    stripped = line.lstrip()
    return f"{line[:len(line) - len(stripped)]}# {stripped}"


class NotebookParser:
    """Parsing utilities for .py scripts and .ipynb notebooks"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.path_validator = PathValidator()

    def load_source_unit(self, file_path: str) -> SourceUnit:
        """
        Load a script or notebook

        Args:
            file_path: Path to a .py or .ipynb file

        Returns:
            SourceUnit with analyzable text and line provenance

        Raises:
            SourceReadError: File missing, unreadable, not UTF-8 or of another type
            MalformedContainerError: Notebook is not JSON or has no "cells" array
            UnsupportedKernelError: Notebook language metadata is not Python
        """
        validated_path = self.path_validator.validate_source_file(file_path)
        if self.path_validator.is_notebook_file(validated_path):
            return self._load_notebook(validated_path)
        return self._load_script(validated_path)

    def _read_text(self, file_path: str) -> str:
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                return f.read()
        except (OSError, UnicodeDecodeError) as e:
            raise SourceReadError(f"Cannot read {file_path}: {e}", file_path=file_path)

    def _load_script(self, file_path: str) -> SourceUnit:
        text = self._read_text(file_path)
        lines = tuple(split_source_lines(text))
        line_map = {number: LineOrigin(0, number - 1) for number in range(1, len(lines) + 1)}
        return SourceUnit(
            path=file_path,
            kind=UnitKind.SCRIPT,
            cells=(Cell(index=0, kind=CellKind.CODE, source=lines),),
            text=text,
            line_map=line_map,
            language="python",
        )

    def _load_notebook(self, file_path: str) -> SourceUnit:
        raw_text = self._read_text(file_path)
        notebook = self._parse_container(raw_text, file_path)
        language = self._detect_language(notebook, file_path)
        cells = self._parse_cells(notebook)

        unit = SourceUnit(
            path=file_path,
            kind=UnitKind.NOTEBOOK,
            cells=cells,
            text="",
            line_map={},
            language=language,
        )
        converted = self.convert_notebook_to_script(unit)
        self.logger.debug(f"Converted {file_path}: {len(unit.code_cells)} code cells, {len(converted.line_map)} mapped lines")
        return dataclasses.replace(
            unit,
            text=converted.text,
            line_map=converted.line_map,
            placeholder_lines=converted.placeholder_lines,
        )

    def _parse_container(self, raw_text: str, file_path: str) -> nbformat.NotebookNode:
        try:
            raw = json.loads(raw_text)
        except json.JSONDecodeError as e:
            raise MalformedContainerError(f"Invalid notebook JSON in {file_path}: {e}", file_path=file_path)

        if not isinstance(raw, dict) or not isinstance(raw.get("cells"), list):
            raise MalformedContainerError(f"Notebook has no top-level 'cells' array: {file_path}", file_path=file_path)

        try:
            if "nbformat" in raw:
                return nbformat.reads(raw_text, as_version=4)
            # bare {"cells": [...]} containers carry no version to convert from
            return nbformat.from_dict(raw)
        except Exception as e:
            raise MalformedContainerError(f"Unreadable notebook container {file_path}: {e}", file_path=file_path)

    def _detect_language(self, notebook: nbformat.NotebookNode, file_path: str) -> str:
        metadata = notebook.get("metadata") or {}
        kernelspec = metadata.get("kernelspec") or {}
        language_info = metadata.get("language_info") or {}
        language = kernelspec.get("language") or language_info.get("name")

        if not language:
            return "unknown"
        if str(language).strip().lower() not in PYTHON_LANGUAGES:
            raise UnsupportedKernelError(str(language), file_path=file_path)
        return "python"

    def _parse_cells(self, notebook: nbformat.NotebookNode) -> Tuple[Cell, ...]:
        cells: List[Cell] = []
        for index, raw_cell in enumerate(notebook.get("cells") or []):
            source = raw_cell.get("source", "")
            if isinstance(source, list):
                source = "".join(source)
            cell_type = raw_cell.get("cell_type")
            try:
                kind = CellKind(cell_type)
            except ValueError:
                self.logger.warning(f"Unknown cell type {cell_type!r} at cell {index}; treated as raw")
                kind = CellKind.RAW
            cells.append(Cell(
                index=index,
                kind=kind,
                source=tuple(split_source_lines(str(source))),
                outputs_present=bool(raw_cell.get("outputs")),
            ))
        return tuple(cells)

    def convert_notebook_to_script(self, unit: SourceUnit) -> ConvertedScript:
        """
        Turn every code cell into a function ``cell_<index>`` whose body is
        the cell source indented one level. Directive lines become comments
        so line numbers stay aligned; markdown and raw cells emit nothing.

        Args:
            unit: Notebook SourceUnit (cells populated)

        Returns:
            ConvertedScript with text, line map and placeholder line numbers
        """
        if unit.kind != UnitKind.NOTEBOOK:
            raise ValueError(f"Only notebooks are converted, got {unit.kind.value}: {unit.path}")

        out_lines: List[str] = []
        line_map: Dict[int, LineOrigin] = {}
        placeholders = set()

        for cell in unit.cells:
            if cell.kind != CellKind.CODE:
                continue
            out_lines.append(f"def {cell_function_name(cell.index)}():")

            directives = directive_lines(cell.source)
            body = [directive_comment(line) if index in directives else line
                    for index, line in enumerate(cell.source)]
            for line_index, line in enumerate(body):
                out_lines.append(BODY_INDENT + line)
                line_map[len(out_lines)] = LineOrigin(cell.index, line_index)

            if not self._has_statements(body):
                out_lines.append(BODY_INDENT + PLACEHOLDER_STATEMENT)
                placeholders.add(len(out_lines))

        text = "\n".join(out_lines) + ("\n" if out_lines else "")
        return ConvertedScript(text=text, line_map=line_map, placeholder_lines=frozenset(placeholders))

    @staticmethod
    def _has_statements(body: List[str]) -> bool:
        try:
            return bool(ast.parse("\n".join(body)).body)
        except SyntaxError:
            # emitted as-is; the parse of the whole unit reports it
            return True
