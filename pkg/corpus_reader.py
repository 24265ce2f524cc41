"""
Corpus reader facade over the analysis modules
"""
from typing import List, Dict, Any, Optional, Sequence, Tuple

from modules import CorpusAnalyzer, NotebookParser, FileScanner, ErrorHandler, AnalysisConfig, ProgressTracker
from modules.core.report_builder import CloneReport, CorpusReport, ExcludedUnit
from modules.utils.error_handler import ValidationError


class CorpusReader:
    """
    Reads one or more corpus roots and runs the requested analyses on them.
    """

    def __init__(self, config: Optional[AnalysisConfig] = None, error_handler: Optional[ErrorHandler] = None):
        """
        Initialize Corpus Reader

        Args:
            config: Run configuration (defaults when omitted)
            error_handler: Shared error handler; a new one is created when omitted
        """
        self.config = config or AnalysisConfig()

        # Initialize modules
        self.error_handler = error_handler or ErrorHandler()
        self.progress_tracker = ProgressTracker()
        self.progress_tracker.register_callback(self._log_progress)
        self.analyzer = CorpusAnalyzer(self.config, self.error_handler, self.progress_tracker)
        self.notebook_parser = NotebookParser()
        self.file_scanner = FileScanner()

    def _log_progress(self, state) -> None:
        if state.is_complete:
            status = self.progress_tracker.get_formatted_status()
            self.error_handler.log_info(
                f"{status['progress_text']} files in {status['elapsed_time']}, {status['failed']} excluded", "progress")
        elif state.total:
            self.error_handler.log_debug(f"[{state.current}/{state.total}] {state.message}", "progress")

    def list_files(self, roots: Sequence[str]) -> List[Dict[str, Any]]:
        """
        Discovered scripts and notebooks of every root, without analysis

        Returns:
            One dictionary per root with its file information
        """
        listing = []
        for root in roots:
            try:
                summary = self.file_scanner.scan_directory_summary(root)
            except ValidationError as e:
                self.error_handler.handle_exception(e, "list_files", "validation_error")
                raise
            summary['root'] = root
            listing.append(summary)
        return listing

    def analyze(self, roots: Sequence[str]) -> List[CorpusReport]:
        """
        Full analysis of every root

        Raises:
            ValidationError: A root is missing or not a directory
            EmptyCorpusError: A root holds no scripts or notebooks
        """
        try:
            return self.analyzer.analyze_roots(roots)
        except Exception as e:
            self.error_handler.handle_exception(e, "analyze", "analysis_error")
            raise

    def clones(self, roots: Sequence[str]) -> Tuple[CloneReport, List[ExcludedUnit], List]:
        """
        Clone detection over the union of the roots. Unit labels are relative
        paths, prefixed with the root when several roots are given.

        Returns:
            (clone report, excluded units, loaded units)
        """
        units, labels, excluded = [], [], []
        prefix = len(roots) > 1
        try:
            for root in roots:
                root_units, root_labels, root_excluded = self.analyzer.load_units(root)
                display = self.analyzer.display_root(root)
                units.extend(root_units)
                labels.extend(f"{display}/{label}" if prefix else label for label in root_labels)
                excluded.extend(
                    ExcludedUnit(f"{display}/{e.path}", e.reason, e.message) if prefix else e for e in root_excluded
                )
        except Exception as e:
            self.error_handler.handle_exception(e, "clones", "analysis_error")
            raise

        report = self.analyzer.detect_clones(units, labels) if units else CloneReport()
        return report, excluded, units

    def doc_stats(self, roots: Sequence[str]) -> List[CorpusReport]:
        """Documentation statistics of every root"""
        try:
            return [self.analyzer.collect_doc_stats(root) for root in roots]
        except Exception as e:
            self.error_handler.handle_exception(e, "doc_stats", "analysis_error")
            raise

    def convert(self, notebook_path: str) -> str:
        """
        Analyzable script text of a notebook (scripts are returned verbatim)

        Raises:
            ProcessingError: The file cannot be loaded
        """
        try:
            return self.notebook_parser.load_source_unit(notebook_path).text
        except Exception as e:
            self.error_handler.handle_exception(e, "convert", "parse_error")
            raise
