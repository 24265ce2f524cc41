import ast
import json

import pytest

from modules.core.models import CellKind, LineOrigin, UnitKind
from modules.core.notebook_parser import BODY_INDENT, directive_comment, directive_lines
from modules.utils.error_handler import MalformedContainerError, SourceReadError, UnsupportedKernelError

NOTEBOOKS = {
    "plain": [("code", "x = 1\ny = x + 1"), ("code", "print(y)")],
    "magics": [("code", "%matplotlib inline\nimport numpy as np"), ("code", "!pip install seaborn\n%%time\nz = np.zeros(3)")],
    "markdown": [("markdown", "# Title\nSome *words* here"), ("code", "a = [1, 2]"), ("markdown", "More"),
                 ("code", "a.append(3)")],
    "empty_cells": [("code", ""), ("code", "# only a comment"), ("code", "b = 2"), ("raw", "raw text")],
    "nested": [("code", "def f(v):\n    if v:\n        return 1\n    return 0"), ("code", "for i in range(3):\n    f(i)")],
}


def node_shape(statements):
    """Node types and names, ignoring constants (body lines are re-indented)"""
    return [(type(node).__name__, getattr(node, "id", None))
            for statement in statements for node in ast.walk(statement) if not isinstance(node, ast.Constant)]


def expected_text_line(cell, line_index):
    line = cell.source[line_index]
    return BODY_INDENT + (directive_comment(line) if line_index in directive_lines(cell.source) else line)


@pytest.mark.parametrize("name", sorted(NOTEBOOKS))
def test_conversion_keeps_line_provenance(name, write_notebook, parser):
    unit = parser.load_source_unit(write_notebook(NOTEBOOKS[name], name=f"{name}.ipynb"))

    text_lines = unit.lines
    assert unit.line_map, "every fixture has at least one mapped line"
    for number, origin in unit.line_map.items():
        cell = unit.cells[origin.cell]
        assert cell.kind == CellKind.CODE
        assert text_lines[number - 1] == expected_text_line(cell, origin.line)

    mapped_per_cell = {}
    for origin in unit.line_map.values():
        mapped_per_cell[origin.cell] = mapped_per_cell.get(origin.cell, 0) + 1
    for cell in unit.code_cells:
        assert mapped_per_cell.get(cell.index, 0) == len(cell.source)

    functions = [node for node in ast.parse(unit.text).body if isinstance(node, ast.FunctionDef)]
    assert len(functions) == len(unit.code_cells)
    assert [f.name for f in functions] == [f"cell_{c.index:04d}" for c in unit.code_cells]


def test_empty_and_comment_only_cells_get_placeholders(write_notebook, parser):
    unit = parser.load_source_unit(write_notebook(NOTEBOOKS["empty_cells"]))

    assert unit.lines == [
        "def cell_0000():",
        "    pass",
        "def cell_0001():",
        "    # only a comment",
        "    pass",
        "def cell_0002():",
        "    b = 2",
    ]
    assert unit.placeholder_lines == frozenset({2, 5})
    assert unit.line_map == {4: LineOrigin(1, 0), 7: LineOrigin(2, 0)}
    assert unit.is_synthetic(1) and unit.is_synthetic(2)


def test_directives_become_comments(write_notebook, parser):
    unit = parser.load_source_unit(write_notebook(NOTEBOOKS["magics"]))

    assert "    # %matplotlib inline" in unit.lines
    assert "    # !pip install seaborn" in unit.lines
    assert "    # %%time" in unit.lines
    ast.parse(unit.text)


def test_markdown_and_raw_cells_emit_no_code(write_notebook, parser):
    unit = parser.load_source_unit(write_notebook(NOTEBOOKS["markdown"]))

    assert unit.kind == UnitKind.NOTEBOOK
    assert [c.kind for c in unit.cells] == [CellKind.MARKDOWN, CellKind.CODE, CellKind.MARKDOWN, CellKind.CODE]
    assert "Title" not in unit.text
    assert unit.lines[0] == "def cell_0001():"


def test_script_is_loaded_verbatim(write_script, parser):
    unit = parser.load_source_unit(write_script("a = 1\n\nb = a\n"))

    assert unit.kind == UnitKind.SCRIPT
    assert unit.text == "a = 1\n\nb = a\n"
    assert len(unit.cells) == 1
    assert unit.line_map == {1: LineOrigin(0, 0), 2: LineOrigin(0, 1), 3: LineOrigin(0, 2)}
    assert unit.placeholder_lines == frozenset()


def test_unsupported_kernel_is_rejected(write_notebook, parser):
    with pytest.raises(UnsupportedKernelError) as excinfo:
        parser.load_source_unit(write_notebook([("code", "x <- 1")], language="R"))

    assert excinfo.value.reason == "unsupported_kernel:R"


def test_missing_language_metadata_is_accepted(write_notebook, parser):
    unit = parser.load_source_unit(write_notebook([("code", "x = 1")], language=None))

    assert unit.language == "unknown"
    assert unit.lines == ["def cell_0000():", "    x = 1"]


def test_invalid_json_is_malformed(tmp_path, parser):
    path = tmp_path / "broken.ipynb"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(MalformedContainerError):
        parser.load_source_unit(str(path))


def test_missing_cells_array_is_malformed(tmp_path, parser):
    path = tmp_path / "nocells.ipynb"
    path.write_text(json.dumps({"metadata": {}, "nbformat": 4, "nbformat_minor": 5}), encoding="utf-8")

    with pytest.raises(MalformedContainerError):
        parser.load_source_unit(str(path))


def test_bare_cells_container_is_read(tmp_path, parser):
    path = tmp_path / "bare.ipynb"
    path.write_text(json.dumps({"cells": [{"cell_type": "code", "source": ["x = 1\n", "y = 2"]}]}), encoding="utf-8")

    unit = parser.load_source_unit(str(path))

    assert unit.lines == ["def cell_0000():", "    x = 1", "    y = 2"]


def test_undecodable_script_is_a_read_error(tmp_path, parser):
    path = tmp_path / "latin.py"
    path.write_bytes("name = 'caf\xe9'\n".encode("latin-1"))

    with pytest.raises(SourceReadError) as excinfo:
        parser.load_source_unit(str(path))

    assert excinfo.value.reason == "io_error"


def test_missing_file_is_a_read_error(tmp_path, parser):
    with pytest.raises(SourceReadError):
        parser.load_source_unit(str(tmp_path / "absent.py"))


def test_only_notebooks_are_converted(load_script, parser):
    with pytest.raises(ValueError):
        parser.convert_notebook_to_script(load_script("x = 1\n"))


@pytest.mark.parametrize("source", [
    'msg = (\n    "%d items"\n    % n\n)',
    "ok = (\n    a\n    != b\n)",
    'label = ("%s-%d"\n         % (name, n))',
    "total = a \\\n    % b",
    'doc = """\n!not a shell escape\n%not a magic\n"""',
])
def test_continuation_lines_are_not_directives(source, write_notebook, parser):
    unit = parser.load_source_unit(write_notebook([("code", source)]))

    assert directive_lines(source.split("\n")) == frozenset()
    assert unit.lines[1:] == [BODY_INDENT + line for line in source.split("\n")]
    cell_body = ast.parse(unit.text).body[0].body
    assert node_shape(cell_body) == node_shape(ast.parse(source).body)


def test_operator_continuation_keeps_its_reads(write_notebook, parser):
    unit = parser.load_source_unit(write_notebook([("code", 'msg = (\n    "%d items"\n    % n\n)')]))

    names = {node.id for node in ast.walk(ast.parse(unit.text)) if isinstance(node, ast.Name)}
    assert "n" in names


def test_directives_start_logical_lines():
    source = [
        "values = (1,",
        "          2)",
        "%timeit sum(values)",
        "for v in values:",
        "    !echo {v}",
        "x = v \\",
        "    % 2",
        "%%capture",
    ]

    assert directive_lines(source) == frozenset({2, 4, 7})


def test_script_lines_follow_tokenizer_line_breaks(tmp_path, parser):
    script = tmp_path / "separators.py"
    script.write_text("x = 1\n\x0cy = 2\ns = 'a b\x1cc'\nz = 3\n", encoding="utf-8")

    unit = parser.load_source_unit(str(script))

    assert len(unit.lines) == 4
    assert len(unit.cells[0].source) == 4
    for statement in ast.parse(unit.text).body:
        target = statement.targets[0].id
        assert unit.lines[statement.lineno - 1].lstrip("\x0c").startswith(f"{target} = ")
