import os

import pytest

from modules.core.corpus_analyzer import CorpusAnalyzer, analyze_file
from modules.core.report_builder import ReportBuilder
from modules.utils.config_manager import AnalysisConfig
from modules.utils.error_handler import EmptyCorpusError, ValidationError

MIXED_SOURCE = """\
import pandas as pd

def clean(frame, column):
    frame = frame.dropna()
    frame[column] = frame[column].astype(int)
    return frame

df = pd.read_csv("data.csv")
rows = []
for index, row in df.iterrows():
    if row["value"] > 0:
        rows.append(row)
summary = describe(rows)
rows.sort()
df = clean(df, "value")
"""


@pytest.fixture
def corpus(tmp_path, write_script, write_notebook, fig_scattered):
    root = tmp_path / "corpus"
    write_script(fig_scattered, "scattered.py", directory=root)
    write_script(MIXED_SOURCE, "mixed.py", directory=root / "pkg")
    write_script("x = 1\ny = (\n", "broken.py", directory=root)
    write_notebook([("markdown", "# Load"), ("code", "import json\ndata = json.load(fh)"),
                    ("code", "data['k'] = 1\nprint(data)")], "explore.ipynb", directory=root)
    write_notebook([("code", "x <- 1")], "other.ipynb", language="R", directory=root)
    return root


def test_empty_directory_is_an_empty_corpus(tmp_path):
    (tmp_path / "empty").mkdir()
    (tmp_path / "empty" / "notes.txt").write_text("nothing to see", encoding="utf-8")

    with pytest.raises(EmptyCorpusError):
        CorpusAnalyzer().analyze_corpus(str(tmp_path / "empty"))


def test_missing_root_is_a_validation_error(tmp_path):
    with pytest.raises(ValidationError):
        CorpusAnalyzer().analyze_corpus(str(tmp_path / "absent"))


def test_failures_become_exclusions(corpus):
    report = CorpusAnalyzer(AnalysisConfig(clones_enabled=False)).analyze_corpus(str(corpus))

    assert [u.path for u in report.units] == ["explore.ipynb", "pkg/mixed.py", "scattered.py"]
    assert [(e.path, e.reason) for e in report.excluded] == [
        ("broken.py", "syntax_error:2"),
        ("other.ipynb", "unsupported_kernel:R"),
    ]
    assert report.discovered == 5


def test_notebook_units_are_analysed_per_cell(corpus):
    report = CorpusAnalyzer(AnalysisConfig(clones_enabled=False)).analyze_corpus(str(corpus))

    notebook = next(u for u in report.units if u.path == "explore.ipynb")
    assert notebook.kind == "notebook"
    assert [s.scope for s in notebook.scopes] == ["cell_0001", "cell_0002"]
    assert notebook.empty_scopes == ["<module>"]
    assert notebook.doc_stats.markdown_cell_count == 1
    assert notebook.scopes[1].mutating_count_opt == 1


def test_optimistic_never_exceeds_conservative(corpus):
    report = CorpusAnalyzer(AnalysisConfig(clones_enabled=False)).analyze_corpus(str(corpus))

    for unit in report.units:
        for scope in unit.scopes:
            assert scope.mutating_count_opt <= scope.mutating_count_cons
            assert scope.mutating_ratio_opt <= scope.mutating_ratio_cons


def test_seeded_sample_is_deterministic(corpus):
    config = AnalysisConfig(sample=2, seed=11, clones_enabled=False)

    first = CorpusAnalyzer(config).analyze_corpus(str(corpus))
    second = CorpusAnalyzer(config).analyze_corpus(str(corpus))

    paths = [u.path for u in first.units] + [e.path for e in first.excluded]
    assert len(paths) == 2
    assert paths == [u.path for u in second.units] + [e.path for e in second.excluded]
    assert first.config["sample"] == 2


def test_select_files_keeps_path_order():
    analyzer = CorpusAnalyzer(AnalysisConfig(sample=3, seed=5))
    files = [f"f{i:02d}.py" for i in range(20)]

    selected = analyzer.select_files(files)

    assert selected == sorted(selected)
    assert selected == CorpusAnalyzer(AnalysisConfig(sample=3, seed=5)).select_files(reversed(files))
    assert CorpusAnalyzer(AnalysisConfig(sample=50)).select_files(files) == files


def test_worker_count_does_not_change_the_report(corpus):
    builder = ReportBuilder()

    sequential = CorpusAnalyzer(AnalysisConfig(workers=1)).analyze_corpus(str(corpus))
    parallel = CorpusAnalyzer(AnalysisConfig(workers=3)).analyze_corpus(str(corpus))

    assert builder.to_json(sequential) == builder.to_json(parallel)


def test_non_recursive_scan_skips_subdirectories(corpus):
    report = CorpusAnalyzer(AnalysisConfig(recursive_scan=False, clones_enabled=False)).analyze_corpus(str(corpus))

    assert "pkg/mixed.py" not in [u.path for u in report.units]


def test_cfg_dump_writes_one_file_per_scope(corpus, tmp_path):
    dump_dir = tmp_path / "dots"
    config = AnalysisConfig(clones_enabled=False, dump_cfg_dir=str(dump_dir))

    CorpusAnalyzer(config).analyze_corpus(str(corpus))

    names = sorted(os.listdir(dump_dir))
    assert "scattered.py___module.dot" in names
    assert "pkg_mixed.py__clean.dot" in names
    assert (dump_dir / "scattered.py___module.dot").read_text(encoding="utf-8").startswith("digraph")


def test_cfg_dump_keeps_redefined_scopes(tmp_path, write_script, write_notebook):
    root = tmp_path / "redefined"
    write_script("""\
        def plot(v):
            return v

        def plot(v, w):
            return v + w

        class Box:
            @property
            def size(self):
                return self._size

            @size.setter
            def size(self, value):
                self._size = value
        """, "charts.py", directory=root)
    write_notebook([("code", "def plot():\n    pass"), ("code", "def plot():\n    return 1")],
                   "cells.ipynb", directory=root)
    dump_dir = tmp_path / "dots"

    CorpusAnalyzer(AnalysisConfig(clones_enabled=False, dump_cfg_dir=str(dump_dir))).analyze_corpus(str(root))

    names = sorted(os.listdir(dump_dir))
    assert "charts.py__plot_line1.dot" in names
    assert "charts.py__plot_line4.dot" in names
    assert "charts.py__Box.size_line9.dot" in names
    assert "charts.py__Box.size_line13.dot" in names
    assert "charts.py___module.dot" in names
    assert "cells.ipynb__cell_0000.plot.dot" in names
    assert "cells.ipynb__cell_0001.plot.dot" in names


def test_unit_cfgs_are_keyed_by_scope_and_line(tmp_path):
    script = tmp_path / "twice.py"
    script.write_text("def f():\n    return 1\n\ndef f():\n    return 2\n", encoding="utf-8")

    outcome = analyze_file(str(script), "twice.py", AnalysisConfig(dump_cfg_dir=str(tmp_path / "unused")))

    assert sorted(outcome.cfg_dots) == [("<module>", 1), ("f", 1), ("f", 4)]


def test_clones_are_attached_to_the_report(corpus):
    report = CorpusAnalyzer(AnalysisConfig(clone_min_statements=2)).analyze_corpus(str(corpus))

    assert report.clones is not None
    assert report.clones.file_result is not None
    assert ReportBuilder().to_dict(report)["clones"]["high_impact"] == []


def test_load_units_excludes_unparsable_files(corpus):
    units, labels, excluded = CorpusAnalyzer().load_units(str(corpus))

    assert labels == ["explore.ipynb", "pkg/mixed.py", "scattered.py"]
    assert len(units) == 3
    assert [e.reason for e in excluded] == ["syntax_error:2", "unsupported_kernel:R"]


def test_doc_stats_only_run(corpus):
    report = CorpusAnalyzer().collect_doc_stats(str(corpus))

    assert [u.path for u in report.units] == ["broken.py", "explore.ipynb", "pkg/mixed.py", "scattered.py"]
    assert all(u.scopes == [] for u in report.units)
    assert [e.reason for e in report.excluded] == ["unsupported_kernel:R"]


def test_analyze_file_reports_read_errors(tmp_path):
    bad = tmp_path / "latin.py"
    bad.write_bytes("name = 'caf\xe9'\n".encode("latin-1"))

    outcome = analyze_file(str(bad), "latin.py", AnalysisConfig())

    assert outcome.record is None
    assert outcome.excluded.reason == "io_error"
