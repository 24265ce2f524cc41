"""
Corpus Analyzer Module
Discovers, samples and analyzes the scripts and notebooks of a corpus root,
in a worker pool when asked, and assembles the corpus report
"""
import logging
import os
import random
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .cfg_builder import CfgBuilder, ScopeParser
from .clone_detector import CloneDetector
from .doc_stats import DocStatsCalculator
from .metrics_calculator import MetricsCalculator
from .models import SourceUnit
from .notebook_parser import NotebookParser
from .report_builder import CloneReport, CorpusReport, ExcludedUnit, UnitRecord
from .spec_table import MutationSpecTable
from ..utils.config_manager import AnalysisConfig
from ..utils.error_handler import EmptyCorpusError, ErrorHandler, ProcessingError, safe_execute
from ..utils.file_scanner import FileScanner
from ..utils.path_validator import PathValidator
from ..utils.progress_tracker import ProgressTracker

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"
UNSAFE_FILE_CHARACTERS = re.compile(r"[^\w.-]+")


@dataclass
class FileOutcome:
    """Result of one file: a unit record or an exclusion"""
    path: str
    record: Optional[UnitRecord] = None
    excluded: Optional[ExcludedUnit] = None
    unit: Optional[SourceUnit] = None
    cfg_dots: Dict[Tuple[str, int], str] = field(default_factory=dict)


@lru_cache(maxsize=8)
def _cached_table(spec_tables: Tuple[str, ...], use_defaults: bool,
                  mutators: Tuple[str, ...], pure: Tuple[str, ...]) -> MutationSpecTable:
    return MutationSpecTable.load(spec_tables, use_defaults=use_defaults,
                                  heuristic_mutators=mutators or None, heuristic_pure=pure or None)


def build_spec_table(config: AnalysisConfig) -> MutationSpecTable:
    """Spec table for a run; empty heuristic lists fall back to the default name sets"""
    return _cached_table(tuple(config.spec_tables), config.use_default_tables,
                         tuple(config.heuristic_mutators), tuple(config.heuristic_pure))


def analyze_file(file_path: str, relative_path: str, config: AnalysisConfig) -> FileOutcome:
    """
    Load and fully analyze one file. Module-level so worker processes can
    run it; failures become exclusions and are never raised.
    """
    try:
        unit = NotebookParser().load_source_unit(file_path)
        doc_stats = DocStatsCalculator().compute_doc_stats(unit)
        analysis = MetricsCalculator(build_spec_table(config)).analyze_unit(unit)
    except ProcessingError as e:
        return FileOutcome(path=relative_path, excluded=ExcludedUnit(relative_path, e.reason, str(e)))
    except RecursionError as e:
        return FileOutcome(path=relative_path, excluded=ExcludedUnit(relative_path, "recursion_limit", str(e)))
    except Exception as e:
        logger.exception(f"Unexpected failure analyzing {relative_path}")
        return FileOutcome(path=relative_path,
                           excluded=ExcludedUnit(relative_path, f"internal_error:{type(e).__name__}", str(e)))

    record = UnitRecord(
        path=relative_path,
        kind=unit.kind.value,
        language=unit.language,
        doc_stats=doc_stats,
        scopes=analysis.records,
        empty_scopes=analysis.empty_scopes,
    )
    dots = {}
    if config.dump_cfg_dir:
        dots = {key: CfgBuilder.to_dot(cfg) for key, cfg in analysis.cfgs.items()}
    return FileOutcome(path=relative_path, record=record, unit=unit, cfg_dots=dots)


class CorpusAnalyzer:
    """Runs every analysis over a corpus root"""

    def __init__(self, config: Optional[AnalysisConfig] = None, error_handler: Optional[ErrorHandler] = None,
                 progress_tracker: Optional[ProgressTracker] = None):
        self.config = config or AnalysisConfig()
        self.error_handler = error_handler or ErrorHandler()
        self.progress_tracker = progress_tracker or ProgressTracker()
        self.file_scanner = FileScanner()
        self.path_validator = PathValidator()
        self.notebook_parser = NotebookParser()

    def discover(self, root: str) -> List[str]:
        """
        Raises:
            ValidationError: Root missing or not a directory
            EmptyCorpusError: No .py or .ipynb file under the root
        """
        files = self.file_scanner.find_source_files(root, recursive=self.config.recursive_scan)
        if not files:
            raise EmptyCorpusError(root)
        return files

    def select_files(self, files: Sequence[str]) -> List[str]:
        """Seeded random sample of ``config.sample`` files, returned in path order"""
        ordered = sorted(files)
        sample = self.config.sample
        if sample is None or sample >= len(ordered):
            return ordered
        return sorted(random.Random(self.config.seed).sample(ordered, sample))

    def analyze_corpus(self, root: str) -> CorpusReport:
        """
        Args:
            root: Corpus directory

        Returns:
            CorpusReport sorted by relative path

        Raises:
            ValidationError: Root missing or not a directory
            EmptyCorpusError: No source file under the root
        """
        files = self.discover(root)
        selected = self.select_files(files)
        base = self.path_validator.validate_root(root)
        self.error_handler.log_info(f"Analyzing {len(selected)} of {len(files)} files under {root}")

        outcomes = self._run(selected, base)
        report = CorpusReport(
            root=self.display_root(root),
            tool_version=TOOL_VERSION,
            config=self.config.echo(),
            policies=self.config.policies,
            discovered=len(files),
        )
        for outcome in outcomes:
            if outcome.excluded is not None:
                self.error_handler.log_warning(f"Excluded {outcome.path}: {outcome.excluded.reason}")
                report.excluded.append(outcome.excluded)
            else:
                report.units.append(outcome.record)

        if self.config.dump_cfg_dir:
            self._dump_cfgs(outcomes)

        analyzed = [o for o in outcomes if o.unit is not None]
        if self.config.clones_enabled and analyzed:
            report.clones = self.detect_clones([o.unit for o in analyzed], [o.path for o in analyzed])

        report.sort()
        return report

    def analyze_roots(self, roots: Sequence[str]) -> List[CorpusReport]:
        return [self.analyze_corpus(root) for root in roots]

    @staticmethod
    def display_root(root: str) -> str:
        return os.path.normpath(root).replace(os.sep, "/")

    def _relative(self, file_path: str, base: str) -> str:
        return self.file_scanner.get_file_info(file_path, base)["relative_path"]

    def _run(self, files: Sequence[str], base: str) -> List[FileOutcome]:
        jobs = [(path, self._relative(path, base)) for path in files]
        outcomes: List[FileOutcome] = []
        self.progress_tracker.start(len(jobs), message="Analyzing files")

        if self.config.workers <= 1 or len(jobs) <= 1:
            for path, relative in jobs:
                outcome = analyze_file(path, relative, self.config)
                outcomes.append(outcome)
                self.progress_tracker.increment(relative, failed=outcome.excluded is not None)
        else:
            with ProcessPoolExecutor(max_workers=min(self.config.workers, len(jobs))) as pool:
                futures = [pool.submit(analyze_file, path, relative, self.config) for path, relative in jobs]
                for future in as_completed(futures):
                    outcome = future.result()
                    outcomes.append(outcome)
                    self.progress_tracker.increment(outcome.path, failed=outcome.excluded is not None)

        self.progress_tracker.complete("Analysis complete")
        return sorted(outcomes, key=lambda o: o.path)

    def detect_clones(self, units: Sequence[SourceUnit], labels: Sequence[str]) -> CloneReport:
        """Block classes, file classes and the high-impact subset for already parsed units"""
        detector = CloneDetector(threshold=self.config.clone_threshold,
                                 min_statements=self.config.clone_min_statements)
        fragments = []
        for unit, label in zip(units, labels):
            fragments.extend(detector.extract_blocks(unit, label=label))
        block_classes = detector.detect_clone_classes(fragments)

        file_result = None
        if self.config.clone_file_level and len(units) >= 2:
            file_result = detector.detect_file_clones(units, labels=labels)

        high_impact = detector.filter_high_impact(
            block_classes,
            min_lines=self.config.clone_min_lines,
            min_instances=self.config.clone_min_instances,
            file_classes=file_result.classes if file_result else None,
        )
        self.error_handler.log_info(f"Clone detection: {len(block_classes)} block classes, "
                                    f"{len(high_impact)} high-impact")
        return CloneReport(block_classes=block_classes, high_impact=high_impact, file_result=file_result)

    def load_units(self, root: str) -> Tuple[List[SourceUnit], List[str], List[ExcludedUnit]]:
        """
        Load (and parse-check) the selected files of a root without computing metrics

        Returns:
            (units, relative labels, exclusions)
        """
        files = self.select_files(self.discover(root))
        base = self.path_validator.validate_root(root)
        units, labels, excluded = [], [], []
        for path in files:
            relative = self._relative(path, base)
            try:
                unit = self.notebook_parser.load_source_unit(path)
                ScopeParser.parse_tree(unit)
            except ProcessingError as e:
                self.error_handler.log_warning(f"Excluded {relative}: {e.reason}")
                excluded.append(ExcludedUnit(relative, e.reason, str(e)))
                continue
            units.append(unit)
            labels.append(relative)
        return units, labels, excluded

    def collect_doc_stats(self, root: str) -> CorpusReport:
        """Documentation statistics only; units that fail to load are excluded"""
        files = self.select_files(self.discover(root))
        base = self.path_validator.validate_root(root)
        calculator = DocStatsCalculator()
        report = CorpusReport(root=self.display_root(root), tool_version=TOOL_VERSION,
                              config=self.config.echo(), policies=self.config.policies, discovered=len(files))
        for path in files:
            relative = self._relative(path, base)
            try:
                unit = self.notebook_parser.load_source_unit(path)
            except ProcessingError as e:
                report.excluded.append(ExcludedUnit(relative, e.reason, str(e)))
                continue
            report.units.append(UnitRecord(path=relative, kind=unit.kind.value, language=unit.language,
                                           doc_stats=calculator.compute_doc_stats(unit)))
        report.sort()
        return report

    def _dump_cfgs(self, outcomes: Sequence[FileOutcome]) -> None:
        directory = self.path_validator.ensure_output_directory(self.config.dump_cfg_dir, "cfg_dump")
        for outcome in outcomes:
            name_counts = Counter(name for name, _ in outcome.cfg_dots)
            for (scope_name, line), dot in sorted(outcome.cfg_dots.items()):
                label = scope_name if name_counts[scope_name] == 1 else f"{scope_name}_line{line}"
                stem = UNSAFE_FILE_CHARACTERS.sub("_", f"{outcome.path}__{label}").strip("_")
                self._write_cfg_dump(os.path.join(directory, f"{stem}.dot"), dot)

    @safe_execute(context="cfg_dump", error_type="export_error")
    def _write_cfg_dump(self, file_path: str, dot: str) -> Dict[str, object]:
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(dot)
        return {"success": True, "output_file": file_path}
