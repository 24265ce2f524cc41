"""
Report exporter writing analysis results as JSON, CSV or xlsx
"""
import sys
from typing import List, Dict, Any, Optional, Sequence

import pandas as pd

from modules import ReportBuilder, ExcelFormatter, ErrorHandler, PathValidator
from modules.core.report_builder import CloneReport, CorpusReport, ExcludedUnit
from modules.utils.error_handler import ExportError


class ReportExporter:
    """
    Writes reports to a file, or to stdout when no file is given.
    xlsx output always needs a file.
    """

    def __init__(self, file_path: Optional[str] = None, error_handler: Optional[ErrorHandler] = None):
        """
        Initialize Report Exporter

        Args:
            file_path: Output file path (None for stdout)
            error_handler: Shared error handler
        """
        self.file_path = file_path

        # Initialize modules
        self.report_builder = ReportBuilder()
        self.excel_formatter = ExcelFormatter()
        self.error_handler = error_handler or ErrorHandler()
        self.path_validator = PathValidator()

        # Validate output file path
        if self.file_path:
            try:
                self.file_path = self.path_validator.validate_output_path(file_path, "report")
            except ExportError as e:
                self.error_handler.handle_exception(e, "ReportExporter.__init__", "path_validation")
                raise

    def export_reports(self, reports: Sequence[CorpusReport], fmt: str = "json") -> Dict[str, Any]:
        """
        Export corpus reports; several reports become a comparison document

        Args:
            reports: Analysed corpora
            fmt: json, csv or xlsx

        Returns:
            Result dictionary
        """
        if fmt == "json":
            if len(reports) == 1:
                text = self.report_builder.to_json(reports[0])
            else:
                text = self.report_builder.dumps(self.report_builder.comparison_document(reports))
            return self._write_text(text, fmt)
        if fmt == "csv":
            return self._write_text(self.report_builder.to_csv(reports), fmt)
        if fmt == "xlsx":
            return self._write_workbook(reports)
        raise ExportError(f"Unsupported report format: {fmt}", export_type=fmt)

    def export_clones(self, clones: CloneReport, roots: Sequence[str], config: Dict[str, Any], tool_version: str,
                      excluded: Sequence[ExcludedUnit] = (), fmt: str = "json") -> Dict[str, Any]:
        """Export a clone report as a JSON document or one CSV row per instance"""
        if fmt == "csv":
            return self._write_text(self.report_builder.frame_csv(self.report_builder.clone_frame(clones)), fmt)
        if fmt != "json":
            raise ExportError(f"Unsupported clone report format: {fmt}", export_type=fmt)
        document = self.report_builder.clone_document(clones, roots, config, tool_version, excluded)
        return self._write_text(self.report_builder.dumps(document), fmt)

    def export_doc_stats(self, reports: Sequence[CorpusReport], fmt: str = "json") -> Dict[str, Any]:
        if fmt == "csv":
            frames = []
            for report in reports:
                frame = self.report_builder.doc_stats_frame(report)
                if len(reports) > 1:
                    frame.insert(0, "root", report.root)
                frames.append(frame)
            return self._write_text(self.report_builder.frame_csv(pd.concat(frames, ignore_index=True)), fmt)
        if fmt != "json":
            raise ExportError(f"Unsupported docstats format: {fmt}", export_type=fmt)
        return self._write_text(self.report_builder.dumps(self.report_builder.doc_stats_document(reports)), fmt)

    def _write_text(self, text: str, fmt: str) -> Dict[str, Any]:
        if not self.file_path:
            sys.stdout.write(text)
            sys.stdout.flush()
            return {'success': True, 'format': fmt, 'output_file': None}
        try:
            with open(self.file_path, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
        except OSError as e:
            self.error_handler.handle_exception(e, "ReportExporter._write_text", "export_error")
            raise ExportError(f"Cannot write report {self.file_path}: {e}", export_type=fmt, output_file=self.file_path)
        self.error_handler.log_info(f"Report written to {self.file_path}", "export")
        return {'success': True, 'format': fmt, 'output_file': self.file_path}

    def _write_workbook(self, reports: Sequence[CorpusReport]) -> Dict[str, Any]:
        if not self.file_path:
            raise ExportError("xlsx output requires --out FILE", export_type="xlsx")

        builder = self.report_builder
        multiple = len(reports) > 1
        frames = {
            "Scopes": pd.concat([builder.scope_frame(r, root_column=multiple) for r in reports], ignore_index=True),
            "Units": self._concat(builder.unit_frame, reports, multiple),
            "Aggregates": self._concat(builder.aggregates_frame, reports, multiple),
            "Excluded": self._concat(builder.excluded_frame, reports, multiple),
        }
        summary: List[tuple] = []
        for report in reports:
            summary += [
                (f"Corpus: {report.root}", ""),
                ("Discovered files", report.discovered),
                ("Analyzed units", len(report.units)),
                ("Excluded units", len(report.excluded)),
                ("Policies", ", ".join(report.policies)),
            ]
            if report.clones is not None:
                summary.append(("Block clone classes", len(report.clones.block_classes)))
                summary.append(("High-impact classes", len(report.clones.high_impact)))

        try:
            self.excel_formatter.save_formatted_excel(frames, self.file_path, summary)
        except (OSError, ValueError) as e:
            self.error_handler.handle_exception(e, "ReportExporter._write_workbook", "export_error")
            raise ExportError(f"Cannot write workbook {self.file_path}: {e}", export_type="xlsx",
                              output_file=self.file_path)
        self.error_handler.log_info(f"Workbook written to {self.file_path}", "export")
        return {'success': True, 'format': 'xlsx', 'output_file': self.file_path}

    @staticmethod
    def _concat(make_frame, reports: Sequence[CorpusReport], root_column: bool):
        frames = []
        for report in reports:
            frame = make_frame(report)
            if root_column:
                frame.insert(0, "root", report.root)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)
