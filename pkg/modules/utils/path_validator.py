"""
Path Validator Module
Checks corpus roots, source files and report destinations, raising the
analyzer's own error types
"""
import os
from pathlib import Path
from typing import Optional, Union

from .error_handler import ValidationError, SourceReadError, ExportError

PYTHON_EXTENSION = '.py'
NOTEBOOK_EXTENSION = '.ipynb'
SOURCE_EXTENSIONS = (PYTHON_EXTENSION, NOTEBOOK_EXTENSION)

PathLike = Union[str, Path]


class PathValidator:
    """Validates corpus, source and output paths"""

    @staticmethod
    def validate_root(root: Optional[PathLike]) -> str:
        """
        Resolve a corpus root to an absolute directory path

        Raises:
            ValidationError: Root not given, missing, or not a directory
        """
        if not root:
            raise ValidationError("A corpus root must be provided.", field="root", value=root)

        resolved = os.path.abspath(root)
        if not os.path.isdir(resolved):
            reason = "is not a directory" if os.path.exists(resolved) else "does not exist"
            raise ValidationError(f"Corpus root {reason}: {resolved}", field="root", value=str(root))
        return resolved

    @classmethod
    def validate_source_file(cls, file_path: PathLike) -> str:
        """
        Resolve a .py or .ipynb file that must exist

        Raises:
            SourceReadError: Missing, not a regular file, or of another type
        """
        resolved = os.path.abspath(file_path)
        if not os.path.isfile(resolved):
            raise SourceReadError(f"Source file does not exist: {resolved}", file_path=str(file_path))
        if not cls.is_source_file(resolved):
            raise SourceReadError(f"Not a .py or .ipynb file: {resolved}", file_path=resolved)
        return resolved

    @staticmethod
    def validate_output_path(file_path: PathLike, export_type: Optional[str] = None) -> str:
        """
        Resolve a report destination whose parent directory exists

        Raises:
            ExportError: Parent missing, or the path names a directory
        """
        resolved = os.path.abspath(file_path)
        parent = os.path.dirname(resolved)
        if not os.path.isdir(parent):
            raise ExportError(f"Output directory does not exist: {parent}",
                              export_type=export_type, output_file=str(file_path))
        if os.path.isdir(resolved):
            raise ExportError(f"Output path is a directory: {resolved}",
                              export_type=export_type, output_file=str(file_path))
        return resolved

    @staticmethod
    def ensure_output_directory(dir_path: PathLike, export_type: Optional[str] = None) -> str:
        """
        Create an output directory (CFG dumps, converted sources) if needed

        Raises:
            ExportError: Directory cannot be created
        """
        resolved = os.path.abspath(dir_path)
        try:
            os.makedirs(resolved, exist_ok=True)
        except OSError as e:
            raise ExportError(f"Cannot create output directory {resolved}: {e}",
                              export_type=export_type, output_file=str(dir_path))
        return resolved

    @staticmethod
    def is_python_file(file_path: PathLike) -> bool:
        return str(file_path).lower().endswith(PYTHON_EXTENSION)

    @staticmethod
    def is_notebook_file(file_path: PathLike) -> bool:
        return str(file_path).lower().endswith(NOTEBOOK_EXTENSION)

    @staticmethod
    def is_source_file(file_path: PathLike) -> bool:
        return str(file_path).lower().endswith(SOURCE_EXTENSIONS)

    @staticmethod
    def get_file_size(file_path: PathLike) -> int:
        """Size in bytes, 0 when the file cannot be stat'ed"""
        try:
            return os.path.getsize(file_path)
        except OSError:
            return 0
