"""
File Scanner Module
Discovers Python scripts and notebooks under corpus roots
"""
import os
from typing import List, Dict, Any
from .error_handler import ValidationError
from .path_validator import PathValidator

# Directories that never hold corpus material
SKIPPED_DIRECTORIES = {'.git', '.hg', '.svn', '.venv', 'venv', '__pycache__', '.ipynb_checkpoints', 'node_modules'}


class FileScanner:
    """File scanning utilities for .py and .ipynb sources"""

    def __init__(self):
        self.path_validator = PathValidator()

    def find_source_files(self, directory: str, recursive: bool = True) -> List[str]:
        """
        Find all Python scripts and notebooks in directory

        Args:
            directory: Directory to scan
            recursive: Whether to scan subdirectories

        Returns:
            Sorted list of absolute file paths
        """
        validated_dir = self.path_validator.validate_root(directory)
        source_files = []

        if recursive:
            for root, dirs, files in os.walk(validated_dir):
                # prune in place so os.walk skips them
                dirs[:] = sorted(d for d in dirs if d not in SKIPPED_DIRECTORIES)
                for filename in files:
                    if self.path_validator.is_source_file(filename):
                        source_files.append(os.path.join(root, filename))
        else:
            try:
                for filename in os.listdir(validated_dir):
                    file_path = os.path.join(validated_dir, filename)
                    if self.path_validator.is_source_file(filename) and os.path.isfile(file_path):
                        source_files.append(file_path)
            except OSError as e:
                raise ValidationError(f"Cannot scan corpus root {validated_dir}: {e}", field="root", value=directory)

        return sorted(source_files)

    def get_file_info(self, file_path: str, base_directory: str = None) -> Dict[str, Any]:
        """
        Get kind, size and display path of a discovered file

        Args:
            file_path: Path to file
            base_directory: Root used to compute the relative display path

        Returns:
            Dictionary with file information
        """
        relative = os.path.relpath(file_path, base_directory) if base_directory else file_path
        return {
            'path': file_path,
            'relative_path': relative.replace(os.sep, '/'),
            'kind': 'notebook' if self.path_validator.is_notebook_file(file_path) else 'script',
            'size': self.path_validator.get_file_size(file_path),
        }

    def scan_directory_summary(self, directory: str) -> Dict[str, Any]:
        """
        Get summary information about directory contents

        Args:
            directory: Directory to scan

        Returns:
            Dictionary with directory scan summary
        """
        validated_dir = self.path_validator.validate_root(directory)

        summary = {
            'directory': validated_dir,
            'files': [],
            'script_count': 0,
            'notebook_count': 0,
            'total_size': 0,
            'scan_error': None
        }

        try:
            for file_path in self.find_source_files(validated_dir):
                info = self.get_file_info(file_path, validated_dir)
                summary['files'].append(info)
                summary['total_size'] += info['size']
                if info['kind'] == 'notebook':
                    summary['notebook_count'] += 1
                else:
                    summary['script_count'] += 1
        except Exception as e:
            summary['scan_error'] = str(e)

        return summary
