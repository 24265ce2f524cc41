__version__ = "1.0.0"
__author__ = "Notebook Quality Analyzer Team"

from .path_validator import PathValidator
from .error_handler import ErrorHandler, safe_execute
from .file_scanner import FileScanner
from .config_manager import ConfigManager, AnalysisConfig
from .progress_tracker import ProgressTracker

__all__ = ["PathValidator", "ErrorHandler", "safe_execute", "FileScanner", "ConfigManager", "AnalysisConfig", "ProgressTracker"]
