"""
Configuration Manager Module
Manages analysis configuration: defaults, JSON config files and CLI overrides
"""
import copy
import json
import os
from dataclasses import dataclass, asdict, field
from typing import Dict, Any, Optional, List, Tuple

from .error_handler import ValidationError

POLICY_CHOICES = ('optimistic', 'conservative', 'both')
FORMAT_CHOICES = ('json', 'csv', 'xlsx')


@dataclass(frozen=True)
class AnalysisConfig:
    """Immutable, picklable snapshot of the settings one analysis run uses"""
    policy: str = 'both'
    sample: Optional[int] = None
    seed: int = 0
    workers: int = 1
    recursive_scan: bool = True
    spec_tables: Tuple[str, ...] = ()
    use_default_tables: bool = True
    heuristic_mutators: Tuple[str, ...] = ()
    heuristic_pure: Tuple[str, ...] = ()
    clones_enabled: bool = True
    clone_threshold: float = 0.7
    clone_min_lines: int = 10
    clone_min_instances: int = 3
    clone_min_statements: int = 3
    clone_file_level: bool = True
    report_format: str = 'json'
    dump_cfg_dir: Optional[str] = None

    @property
    def policies(self) -> Tuple[str, ...]:
        """Policies whose figures are reported"""
        if self.policy == 'both':
            return ('optimistic', 'conservative')
        return (self.policy,)

    def echo(self) -> Dict[str, Any]:
        """Configuration echo stored in reports (no machine-specific paths)"""
        data = asdict(self)
        data['spec_tables'] = [os.path.basename(p) for p in self.spec_tables]
        data['heuristic_mutators'] = list(self.heuristic_mutators)
        data['heuristic_pure'] = list(self.heuristic_pure)
        data.pop('dump_cfg_dir')
        data.pop('report_format')
        data.pop('workers')
        return data


class ConfigManager:
    """Manages application configuration"""

    DEFAULT_CONFIG = {
        'analysis': {
            'policy': 'both',
            'sample': None,
            'seed': 0,
            'workers': 1,
            'recursive_scan': True
        },
        'mutation': {
            'spec_tables': [],
            'use_default_tables': True,
            'heuristic_mutators': ['append', 'extend', 'insert', 'remove', 'pop', 'clear', 'sort', 'reverse'],
            'heuristic_pure': ['keys', 'values', 'items', 'copy', 'get']
        },
        'clones': {
            'enabled': True,
            'threshold': 0.7,
            'min_lines': 10,
            'min_instances': 3,
            'min_statements': 3,
            'file_level': True
        },
        'report': {
            'format': 'json',
            'dump_cfg_dir': None
        }
    }

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize configuration manager

        Args:
            config_file: Optional JSON file merged over the defaults
        """
        self.config_file = config_file
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file or create default"""
        defaults = copy.deepcopy(self.DEFAULT_CONFIG)
        if not self.config_file:
            return defaults

        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                loaded_config = json.load(f)
        except (json.JSONDecodeError, OSError) as e:
            raise ValidationError(f"Error loading config {self.config_file}: {e}", field='config', value=self.config_file)

        if not isinstance(loaded_config, dict):
            raise ValidationError("Config file must contain a JSON object", field='config', value=self.config_file)
        return self._merge_config(defaults, loaded_config)

    def _merge_config(self, default: Dict[str, Any], loaded: Dict[str, Any]) -> Dict[str, Any]:
        """Merge loaded config with defaults, ensuring all required keys exist"""
        merged = copy.deepcopy(default)

        for key, value in loaded.items():
            if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
                merged[key] = self._merge_config(merged[key], value)
            else:
                merged[key] = value

        return merged

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get configuration value using dot notation

        Args:
            key_path: Dot-separated key path (e.g., 'clones.threshold')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value = self.config
        try:
            for key in key_path.split('.'):
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key_path: str, value: Any) -> None:
        """
        Set configuration value using dot notation

        Args:
            key_path: Dot-separated key path
            value: Value to set
        """
        keys = key_path.split('.')
        config_ref = self.config

        for key in keys[:-1]:
            if key not in config_ref:
                config_ref[key] = {}
            config_ref = config_ref[key]

        config_ref[keys[-1]] = value

    def apply_overrides(self, overrides: Dict[str, Any]) -> None:
        """Apply CLI overrides; None values leave the configured value untouched"""
        for key_path, value in overrides.items():
            if value is not None:
                self.set(key_path, value)

    def validate_config(self) -> Dict[str, Any]:
        """
        Validate current configuration

        Returns:
            Validation result dictionary
        """
        issues: List[str] = []

        if self.get('analysis.policy') not in POLICY_CHOICES:
            issues.append(f"Invalid policy: {self.get('analysis.policy')}")

        sample = self.get('analysis.sample')
        if sample is not None and (not isinstance(sample, int) or sample < 1):
            issues.append(f"Sample size must be a positive integer: {sample}")

        if not isinstance(self.get('analysis.seed'), int):
            issues.append(f"Seed must be an integer: {self.get('analysis.seed')}")

        workers = self.get('analysis.workers')
        if not isinstance(workers, int) or workers < 1:
            issues.append(f"Workers must be a positive integer: {workers}")

        threshold = self.get('clones.threshold')
        if not isinstance(threshold, (int, float)) or not 0 < threshold <= 1:
            issues.append(f"Clone threshold must lie in (0, 1]: {threshold}")

        for key, minimum in (('clones.min_lines', 1), ('clones.min_instances', 2), ('clones.min_statements', 1)):
            value = self.get(key)
            if not isinstance(value, int) or value < minimum:
                issues.append(f"{key} must be an integer >= {minimum}: {value}")

        for path in self.get('mutation.spec_tables') or []:
            if not os.path.isfile(path):
                issues.append(f"Spec table file does not exist: {path}")

        mutators = set(self.get('mutation.heuristic_mutators') or [])
        pure = set(self.get('mutation.heuristic_pure') or [])
        if mutators & pure:
            issues.append(f"Heuristic name sets overlap: {sorted(mutators & pure)}")

        if self.get('report.format') not in FORMAT_CHOICES:
            issues.append(f"Invalid report format: {self.get('report.format')}")

        return {
            'is_valid': len(issues) == 0,
            'issues': issues,
            'config_file': self.config_file
        }

    def to_analysis_config(self) -> AnalysisConfig:
        """
        Build the immutable run configuration

        Raises:
            ValidationError: If the configuration is invalid
        """
        validation = self.validate_config()
        if not validation['is_valid']:
            raise ValidationError("; ".join(validation['issues']), field='config')

        return AnalysisConfig(
            policy=self.get('analysis.policy'),
            sample=self.get('analysis.sample'),
            seed=self.get('analysis.seed'),
            workers=self.get('analysis.workers'),
            recursive_scan=bool(self.get('analysis.recursive_scan')),
            spec_tables=tuple(os.path.abspath(p) for p in self.get('mutation.spec_tables') or []),
            use_default_tables=bool(self.get('mutation.use_default_tables')),
            heuristic_mutators=tuple(self.get('mutation.heuristic_mutators') or ()),
            heuristic_pure=tuple(self.get('mutation.heuristic_pure') or ()),
            clones_enabled=bool(self.get('clones.enabled')),
            clone_threshold=float(self.get('clones.threshold')),
            clone_min_lines=self.get('clones.min_lines'),
            clone_min_instances=self.get('clones.min_instances'),
            clone_min_statements=self.get('clones.min_statements'),
            clone_file_level=bool(self.get('clones.file_level')),
            report_format=self.get('report.format'),
            dump_cfg_dir=self.get('report.dump_cfg_dir'),
        )
