import logging
import textwrap

import nbformat
import pytest
from nbformat import v4

from modules.core.cfg_builder import CfgBuilder, ScopeParser
from modules.core.notebook_parser import NotebookParser
from modules.core.spec_table import MutationSpecTable
from modules.utils.error_handler import LOGGER_NAME, PACKAGE_LOGGER_NAME

CELL_BUILDERS = {
    "code": v4.new_code_cell,
    "markdown": v4.new_markdown_cell,
    "raw": v4.new_raw_cell,
}


@pytest.fixture(autouse=True)
def _isolate_log_handlers():
    """
    Drop the analyzer's log handlers after each test so they never keep a
    reference to a capture stream pytest has already closed
    """
    yield
    for name in (LOGGER_NAME, PACKAGE_LOGGER_NAME):
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)


@pytest.fixture(scope="session")
def spec_table():
    return MutationSpecTable.load()


@pytest.fixture
def parser():
    return NotebookParser()


@pytest.fixture
def write_script(tmp_path):
    """Write dedented source to ``tmp_path/<name>`` and return the path"""
    def _write(text, name="script.py", directory=None):
        target = (directory or tmp_path) / name
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(textwrap.dedent(text), encoding="utf-8")
        return str(target)
    return _write


@pytest.fixture
def write_notebook(tmp_path):
    """
    Write a notebook from (cell_type, source) pairs. ``language`` goes to the
    kernelspec; None leaves the metadata empty.
    """
    def _write(cells, name="notebook.ipynb", language="python", directory=None):
        notebook = v4.new_notebook()
        notebook.cells = [CELL_BUILDERS[kind](source) for kind, source in cells]
        if language is not None:
            notebook.metadata["kernelspec"] = {"name": language, "display_name": language, "language": language}
        target = (directory or tmp_path) / name
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            nbformat.write(notebook, f)
        return str(target)
    return _write


@pytest.fixture
def load_script(write_script, parser):
    """SourceUnit of a dedented script"""
    def _load(text, name="script.py"):
        return parser.load_source_unit(write_script(text, name))
    return _load


@pytest.fixture
def scope_of(load_script, spec_table):
    """Scope by name (module scope by default) of a dedented script"""
    def _scope(text, name="<module>"):
        scopes = ScopeParser(spec_table).parse_scopes(load_script(text))
        return next(s for s in scopes if s.name == name)
    return _scope


@pytest.fixture
def cfg_of(scope_of):
    def _cfg(text, name="<module>"):
        return CfgBuilder().build_cfg(scope_of(text, name))
    return _cfg


FIG_GROUPED = """\
l = []
l.append(1)
l.append(2)
s = sum(l)
a = sum(l) / len(l)
m = max(l)
"""

FIG_SCATTERED = """\
l = []
s = sum(l)
l.append(1)
a = sum(l) / len(l)
m = max(l)
l.append(2)
"""


@pytest.fixture
def fig_grouped():
    return FIG_GROUPED


@pytest.fixture
def fig_scattered():
    return FIG_SCATTERED
