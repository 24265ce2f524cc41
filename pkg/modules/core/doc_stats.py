"""
Documentation Statistics Module
Counts Markdown cells, Markdown words, comments and non-empty lines of code
"""
import io
import logging
import re
import tokenize
from dataclasses import dataclass, asdict
from typing import Dict, Iterable, Set, Tuple

from .models import Cell, CellKind, SourceUnit
from .notebook_parser import directive_lines

logger = logging.getLogger(__name__)

# PEP 263 encoding declaration
ENCODING_PATTERN = re.compile(r'^[ \t\f]*#.*?coding[:=][ \t]*[-\w.]+')
NON_CODE_TOKENS = {tokenize.COMMENT, tokenize.NL, tokenize.NEWLINE, tokenize.INDENT,
                   tokenize.DEDENT, tokenize.ENDMARKER, tokenize.ENCODING}


@dataclass(frozen=True)
class DocStats:
    markdown_cell_count: int = 0
    markdown_word_count: int = 0
    inline_comment_count: int = 0
    code_loc: int = 0
    code_cell_count: int = 0

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


class DocStatsCalculator:
    """Quantitative documentation statistics of a SourceUnit"""

    def compute_doc_stats(self, unit: SourceUnit) -> DocStats:
        """
        Args:
            unit: Loaded script or notebook

        Returns:
            DocStats; a word is a maximal run of non-whitespace characters
        """
        markdown_cells = [c for c in unit.cells if c.kind == CellKind.MARKDOWN]
        code_cells = [c for c in unit.cells if c.kind == CellKind.CODE]

        comments = 0
        code_loc = 0
        for cell in code_cells:
            cell_comments, cell_loc = self._scan_code_cell(cell, first_cell=cell is code_cells[0])
            comments += cell_comments
            code_loc += cell_loc

        return DocStats(
            markdown_cell_count=len(markdown_cells),
            markdown_word_count=sum(self.count_words(c.source) for c in markdown_cells),
            inline_comment_count=comments,
            code_loc=code_loc,
            code_cell_count=len(code_cells),
        )

    @staticmethod
    def count_words(lines: Iterable[str]) -> int:
        return sum(len(line.split()) for line in lines)

    def _scan_code_cell(self, cell: Cell, first_cell: bool) -> Tuple[int, int]:
        """Return (comment count, non-empty code line count) for one code cell"""
        directives = {i + 1 for i in directive_lines(cell.source)}
        # directives are code, but the tokenizer cannot read them
        source = "\n".join("" if (i + 1) in directives else line for i, line in enumerate(cell.source)) + "\n"

        comments = 0
        code_lines: Set[int] = set(directives)
        try:
            for token in tokenize.generate_tokens(io.StringIO(source).readline):
                if token.type == tokenize.COMMENT:
                    if not (first_cell and self._is_header_comment(token)):
                        comments += 1
                elif token.type not in NON_CODE_TOKENS:
                    code_lines.update(range(token.start[0], token.end[0] + 1))
        except (tokenize.TokenError, SyntaxError) as e:
            logger.debug(f"Tokenizing cell {cell.index} failed ({e}); counting by line prefix")
            return self._scan_by_prefix(cell)

        return comments, len(code_lines)

    @staticmethod
    def _is_header_comment(token: tokenize.TokenInfo) -> bool:
        row = token.start[0]
        if row == 1 and token.string.startswith("#!"):
            return True
        return row <= 2 and bool(ENCODING_PATTERN.match(token.string))

    @staticmethod
    def _scan_by_prefix(cell: Cell) -> Tuple[int, int]:
        comments = 0
        code_loc = 0
        for line in cell.source:
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                comments += 1
            else:
                code_loc += 1
        return comments, code_loc
