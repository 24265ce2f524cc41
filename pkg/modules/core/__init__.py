from .models import SourceUnit, Cell, Scope, Statement, Cfg, Policy
from .notebook_parser import NotebookParser
from .doc_stats import DocStats, DocStatsCalculator
from .spec_table import MutationSpecTable
from .mutation_classifier import MutationClassifier, CallEffect
from .cfg_builder import ScopeParser, CfgBuilder
from .dataflow_analyzer import DataflowAnalyzer
from .metrics_calculator import MetricsCalculator, MetricsRecord
from .clone_detector import CloneDetector, CloneClass
from .report_builder import ReportBuilder, CorpusReport, aggregate_stats
from .excel_formatter import ExcelFormatter
from .corpus_analyzer import CorpusAnalyzer, TOOL_VERSION

__all__ = ["SourceUnit", "Cell", "Scope", "Statement", "Cfg", "Policy", "NotebookParser", "DocStats",
           "DocStatsCalculator", "MutationSpecTable", "MutationClassifier", "CallEffect", "ScopeParser",
           "CfgBuilder", "DataflowAnalyzer", "MetricsCalculator", "MetricsRecord", "CloneDetector", "CloneClass",
           "ReportBuilder", "CorpusReport", "aggregate_stats", "ExcelFormatter", "CorpusAnalyzer", "TOOL_VERSION"]
