# Notebook Quality Analyzer Modules
# Static analysis of Python scripts and Jupyter notebooks

__version__ = "1.0.0"
__author__ = "Notebook Quality Analyzer Team"

# Core analysis modules
from .core.notebook_parser import NotebookParser
from .core.doc_stats import DocStatsCalculator
from .core.spec_table import MutationSpecTable
from .core.mutation_classifier import MutationClassifier
from .core.cfg_builder import ScopeParser, CfgBuilder
from .core.dataflow_analyzer import DataflowAnalyzer
from .core.metrics_calculator import MetricsCalculator
from .core.clone_detector import CloneDetector
from .core.report_builder import ReportBuilder
from .core.excel_formatter import ExcelFormatter
from .core.corpus_analyzer import CorpusAnalyzer

# Utility modules
from .utils.path_validator import PathValidator
from .utils.file_scanner import FileScanner
from .utils.error_handler import ErrorHandler, safe_execute
from .utils.config_manager import ConfigManager, AnalysisConfig
from .utils.progress_tracker import ProgressTracker

__all__ = [
    # Core modules
    'NotebookParser',
    'DocStatsCalculator',
    'MutationSpecTable',
    'MutationClassifier',
    'ScopeParser',
    'CfgBuilder',
    'DataflowAnalyzer',
    'MetricsCalculator',
    'CloneDetector',
    'ReportBuilder',
    'ExcelFormatter',
    'CorpusAnalyzer',

    # Utility modules
    'PathValidator',
    'FileScanner',
    'ErrorHandler',
    'ConfigManager',
    'AnalysisConfig',
    'ProgressTracker',
    'safe_execute'
]
