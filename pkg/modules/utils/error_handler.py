"""
Error Handler Module
Centralized error handling, logging set-up and the analyzer's exception types
"""
import logging
import traceback
import sys
from typing import Optional, Dict, Any, Callable
from functools import wraps


LOGGER_NAME = "notebook_analyzer"
# analysis modules log through logging.getLogger(__name__) below this package
PACKAGE_LOGGER_NAME = "modules"


class ErrorHandler:
    """Centralized error handling and logging"""

    def __init__(self, logger_name: str = LOGGER_NAME, level: int = logging.INFO):
        self.logger = logging.getLogger(logger_name)
        self.package_logger = logging.getLogger(PACKAGE_LOGGER_NAME)
        self._setup_logging(level)
        self.error_callbacks: Dict[str, Callable] = {}

    def _setup_logging(self, level: int) -> None:
        """Setup logging configuration (stdout is reserved for reports)"""
        for logger in (self.logger, self.package_logger):
            if not logger.handlers:
                handler = logging.StreamHandler(sys.stderr)
                formatter = logging.Formatter(
                    '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
                )
                handler.setFormatter(formatter)
                logger.addHandler(handler)
            else:
                for handler in logger.handlers:
                    if type(handler) is logging.StreamHandler:
                        handler.setStream(sys.stderr)
        self.logger.setLevel(level)
        self.package_logger.setLevel(max(level, logging.WARNING))

    def set_verbose(self, verbose: bool) -> None:
        """Switch between INFO and DEBUG output"""
        self.logger.setLevel(logging.DEBUG if verbose else logging.INFO)
        self.package_logger.setLevel(logging.DEBUG if verbose else logging.WARNING)

    def register_error_callback(self, error_type: str, callback: Callable) -> None:
        """
        Register callback for specific error types

        Args:
            error_type: Type of error (e.g., "file_error", "parse_error")
            callback: Function to call when this error occurs
        """
        self.error_callbacks[error_type] = callback

    def handle_exception(self, exception: Exception, context: str = "", error_type: str = "general") -> Dict[str, Any]:
        """
        Handle exception with logging and callback notification

        Args:
            exception: The exception that occurred
            context: Context where the exception occurred
            error_type: Type of error for callback routing

        Returns:
            Error information dictionary
        """
        error_info = {
            'exception_type': type(exception).__name__,
            'message': str(exception),
            'context': context,
            'error_type': error_type,
            'traceback': traceback.format_exc(),
            'handled': True
        }

        log_message = f"{context}: {error_info['exception_type']}: {error_info['message']}"
        self.logger.error(log_message)

        if error_type in self.error_callbacks:
            try:
                self.error_callbacks[error_type](error_info)
            except Exception as callback_error:
                self.logger.error(f"Error in callback for {error_type}: {callback_error}")

        return error_info

    def log_info(self, message: str, context: str = "") -> None:
        """Log informational message"""
        full_message = f"{context}: {message}" if context else message
        self.logger.info(full_message)

    def log_warning(self, message: str, context: str = "") -> None:
        """Log warning message"""
        full_message = f"{context}: {message}" if context else message
        self.logger.warning(full_message)

    def log_debug(self, message: str, context: str = "") -> None:
        """Log debug message"""
        full_message = f"{context}: {message}" if context else message
        self.logger.debug(full_message)


def safe_execute(error_handler: Optional[ErrorHandler] = None, context: str = "", error_type: str = "general"):
    """
    Decorator for safe function execution with error handling

    Args:
        error_handler: ErrorHandler instance
        context: Context description for errors
        error_type: Type of error for callback routing
    """
    def decorator(func: Callable):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                if error_handler:
                    error_info = error_handler.handle_exception(e, context, error_type)
                    return {'success': False, 'error': error_info}
                logging.getLogger(LOGGER_NAME).warning(f"{context}: {type(e).__name__}: {e}")
                return {
                    'success': False,
                    'error': {
                        'exception_type': type(e).__name__,
                        'message': str(e),
                        'context': context
                    }
                }
        return wrapper
    return decorator


class ValidationError(Exception):
    """Custom exception for validation errors"""
    def __init__(self, message: str, field: str = None, value: Any = None):
        super().__init__(message)
        self.field = field
        self.value = value


class EmptyCorpusError(ValidationError):
    """No .py or .ipynb file was found under a corpus root"""
    def __init__(self, root: str):
        super().__init__(f"No Python scripts or notebooks found under: {root}", field="root", value=root)
        self.root = root


class ProcessingError(Exception):
    """Custom exception for data processing errors"""
    def __init__(self, message: str, stage: str = None, file_path: str = None):
        super().__init__(message)
        self.stage = stage
        self.file_path = file_path

    @property
    def reason(self) -> str:
        """Short machine-readable reason used in report exclusion lists"""
        return self.stage or "processing_error"


class SourceReadError(ProcessingError):
    """A source file could not be read or decoded"""
    def __init__(self, message: str, file_path: str = None):
        super().__init__(message, stage="io_error", file_path=file_path)


class MalformedContainerError(ProcessingError):
    """Notebook is not valid JSON or lacks the top-level "cells" array"""
    def __init__(self, message: str, file_path: str = None):
        super().__init__(message, stage="malformed_container", file_path=file_path)


class UnsupportedKernelError(ProcessingError):
    """Notebook declares a non-Python language"""
    def __init__(self, language: str, file_path: str = None):
        super().__init__(f"Unsupported notebook language: {language}", stage="unsupported_kernel", file_path=file_path)
        self.language = language

    @property
    def reason(self) -> str:
        return f"unsupported_kernel:{self.language}"


class SourceSyntaxError(ProcessingError):
    """Analyzable text does not parse as Python"""
    def __init__(self, message: str, lineno: Optional[int] = None, file_path: str = None):
        super().__init__(message, stage="syntax_error", file_path=file_path)
        self.lineno = lineno

    @property
    def reason(self) -> str:
        return f"syntax_error:{self.lineno}" if self.lineno else "syntax_error"


class EmptyScopeError(ProcessingError):
    """A scope has no countable statements"""
    def __init__(self, scope_name: str):
        super().__init__(f"Scope has no countable statements: {scope_name}", stage="empty_scope")
        self.scope_name = scope_name


class NonTerminationError(ProcessingError):
    """Dataflow iteration exceeded its bound"""
    def __init__(self, scope_name: str, iterations: int, bound: int):
        super().__init__(
            f"Dataflow for {scope_name} did not stabilise after {iterations} iterations (bound {bound})",
            stage="non_termination",
        )
        self.iterations = iterations
        self.bound = bound


class ExportError(Exception):
    """Custom exception for export operation errors"""
    def __init__(self, message: str, export_type: str = None, output_file: str = None):
        super().__init__(message)
        self.export_type = export_type
        self.output_file = output_file
