"""
Report Builder Module
Corpus report records, nearest-rank distribution summaries and the JSON,
CSV and tabular views of a report
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .clone_detector import CloneClass, FileCloneResult
from .doc_stats import DocStats
from .metrics_calculator import MetricsRecord, UnitMetrics, policy_suffix

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
QUANTILE_PERCENTS = (("q25", 25), ("median", 50), ("q75", 75))

SCOPE_BASE_COLUMNS = ["unit", "unit_kind", "scope", "scope_kind", "scope_line", "statement_count",
                      "variable_count", "max_lifetime", "mean_lifetime"]
POLICY_METRICS = ["mutating_count", "mutating_ratio", "diffusion", "diffusion_normalized"]
UNIT_BASE_COLUMNS = ["unit", "unit_kind", "language", "scope_count", "empty_scope_count", "statement_count",
                     "variable_count", "markdown_cell_count", "markdown_word_count", "inline_comment_count",
                     "code_loc", "code_cell_count"]
UNIT_AGGREGATE_METRICS = ["statement_count", "markdown_cell_count", "markdown_word_count",
                          "inline_comment_count", "code_loc", "code_cell_count"]
SCOPE_POLICY_AGGREGATES = ["mutating_ratio", "diffusion", "diffusion_normalized"]
CLONE_COLUMNS = ["class_id", "granularity", "high_impact", "min_similarity", "unit", "start_line", "end_line",
                 "normalized_line_count"]


@dataclass(frozen=True)
class StatSummary:
    n: int
    min: Optional[float] = None
    q25: Optional[float] = None
    median: Optional[float] = None
    mean: Optional[float] = None
    q75: Optional[float] = None
    max: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "min": self.min, "q25": self.q25, "median": self.median,
                "mean": self.mean, "q75": self.q75, "max": self.max}


def nearest_rank(sorted_values: Sequence[float], percent: int) -> float:
    """Value at rank ceil(percent/100 * n), 1-based, on an ascending sequence"""
    n = len(sorted_values)
    rank = max(1, -(-percent * n // 100))
    return sorted_values[rank - 1]


def aggregate_stats(values: Sequence[Optional[float]]) -> StatSummary:
    """
    Distribution summary with nearest-rank quantiles; None entries are
    skipped and an empty input yields n=0 with absent statistics
    """
    data = sorted(v for v in values if v is not None)
    if not data:
        return StatSummary(n=0)
    quantiles = {name: nearest_rank(data, percent) for name, percent in QUANTILE_PERCENTS}
    return StatSummary(n=len(data), min=data[0], max=data[-1], mean=sum(data) / len(data), **quantiles)


@dataclass
class UnitRecord:
    """Analysis results of one included unit"""
    path: str
    kind: str
    language: str
    doc_stats: DocStats
    scopes: List[MetricsRecord] = field(default_factory=list)
    empty_scopes: List[str] = field(default_factory=list)

    @property
    def totals(self) -> UnitMetrics:
        return UnitMetrics.from_records(self.scopes)


@dataclass(frozen=True)
class ExcludedUnit:
    path: str
    reason: str
    message: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"path": self.path, "reason": self.reason, "message": self.message}


@dataclass
class CloneReport:
    block_classes: List[CloneClass] = field(default_factory=list)
    high_impact: List[CloneClass] = field(default_factory=list)
    file_result: Optional[FileCloneResult] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "block_classes": [c.to_dict() for c in self.block_classes],
            "high_impact": [c.id for c in self.high_impact],
            "file": self.file_result.to_dict() if self.file_result is not None else None,
        }


@dataclass
class CorpusReport:
    root: str
    tool_version: str
    config: Dict[str, Any]
    policies: Tuple[str, ...]
    units: List[UnitRecord] = field(default_factory=list)
    excluded: List[ExcludedUnit] = field(default_factory=list)
    clones: Optional[CloneReport] = None
    discovered: int = 0

    def sort(self) -> None:
        """Deterministic order regardless of how per-file results were merged"""
        self.units.sort(key=lambda u: u.path)
        self.excluded.sort(key=lambda e: e.path)


class ReportBuilder:
    """Turns a CorpusReport into JSON documents and tabular frames"""

    def aggregates(self, report: CorpusReport) -> Dict[str, Dict[str, Dict[str, Any]]]:
        """Unit-, scope- and variable-level distributions of every reported metric"""
        units = report.units
        scopes = [scope for unit in units for scope in unit.scopes]

        unit_level: Dict[str, Dict[str, Any]] = {}
        for metric in UNIT_AGGREGATE_METRICS:
            if metric == "statement_count":
                values = [u.totals.statement_count for u in units]
            else:
                values = [getattr(u.doc_stats, metric) for u in units]
            unit_level[metric] = aggregate_stats(values).to_dict()
        for policy in report.policies:
            suffix = policy_suffix(policy)
            for metric in SCOPE_POLICY_AGGREGATES:
                unit_level[f"{metric}_{suffix}"] = aggregate_stats([u.totals.value(metric, policy) for u in units]).to_dict()

        scope_level: Dict[str, Dict[str, Any]] = {
            "statement_count": aggregate_stats([s.statement_count for s in scopes]).to_dict(),
        }
        for policy in report.policies:
            suffix = policy_suffix(policy)
            for metric in SCOPE_POLICY_AGGREGATES:
                scope_level[f"{metric}_{suffix}"] = aggregate_stats([s.value(metric, policy) for s in scopes]).to_dict()

        lifetimes = [value for s in scopes for _, value in sorted(s.lifetimes.items())]
        return {
            "units": unit_level,
            "scopes": scope_level,
            "variables": {"lifetime": aggregate_stats(lifetimes).to_dict()},
        }

    def scope_record(self, record: MetricsRecord, policies: Sequence[str]) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "scope": record.scope,
            "kind": record.kind.value,
            "line": record.line,
            "statement_count": record.statement_count,
            "variable_count": record.variable_count,
            "max_lifetime": record.max_lifetime,
            "mean_lifetime": record.mean_lifetime,
            "lifetimes": dict(sorted(record.lifetimes.items())),
        }
        for policy in policies:
            suffix = policy_suffix(policy)
            for metric in POLICY_METRICS:
                data[f"{metric}_{suffix}"] = record.value(metric, policy)
            data[f"contributions_{suffix}"] = [c.to_dict() for c in record.value("contributions", policy)]
        return data

    def unit_record(self, unit: UnitRecord, policies: Sequence[str]) -> Dict[str, Any]:
        totals = unit.totals
        total_data: Dict[str, Any] = {"statement_count": totals.statement_count, "variable_count": totals.variable_count}
        for policy in policies:
            suffix = policy_suffix(policy)
            for metric in POLICY_METRICS:
                total_data[f"{metric}_{suffix}"] = totals.value(metric, policy)
        return {
            "path": unit.path,
            "kind": unit.kind,
            "language": unit.language,
            "doc_stats": unit.doc_stats.to_dict(),
            "totals": total_data,
            "scopes": [self.scope_record(s, policies) for s in unit.scopes],
            "empty_scopes": list(unit.empty_scopes),
        }

    def to_dict(self, report: CorpusReport) -> Dict[str, Any]:
        report.sort()
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": report.tool_version,
            "root": report.root,
            "config": report.config,
            "summary": {
                "discovered": report.discovered,
                "selected": len(report.units) + len(report.excluded),
                "analyzed": len(report.units),
                "excluded": len(report.excluded),
            },
            "units": [self.unit_record(u, report.policies) for u in report.units],
            "excluded": [e.to_dict() for e in report.excluded],
            "clones": report.clones.to_dict() if report.clones is not None else None,
            "aggregates": self.aggregates(report),
        }

    def to_json(self, report: CorpusReport) -> str:
        return self.dumps(self.to_dict(report))

    @staticmethod
    def dumps(document: Dict[str, Any]) -> str:
        return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def comparison_document(self, reports: Sequence[CorpusReport]) -> Dict[str, Any]:
        """Several corpora side by side: every report plus aggregates keyed by root"""
        documents = [self.to_dict(r) for r in reports]
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": reports[0].tool_version if reports else None,
            "corpora": documents,
            "comparison": {doc["root"]: doc["aggregates"] for doc in documents},
        }

    def scope_columns(self, policies: Sequence[str]) -> List[str]:
        return SCOPE_BASE_COLUMNS + [f"{m}_{policy_suffix(p)}" for p in policies for m in POLICY_METRICS]

    def scope_frame(self, report: CorpusReport, root_column: bool = False) -> pd.DataFrame:
        """One row per (unit, scope), columns in the documented fixed order"""
        report.sort()
        columns = self.scope_columns(report.policies)
        rows = []
        for unit in report.units:
            for scope in unit.scopes:
                record = self.scope_record(scope, report.policies)
                row = {"unit": unit.path, "unit_kind": unit.kind, "scope": scope.scope,
                       "scope_kind": record["kind"], "scope_line": scope.line}
                row.update({c: record[c] for c in columns if c in record})
                rows.append(row)
        frame = pd.DataFrame(rows, columns=columns)
        if root_column:
            frame.insert(0, "root", report.root)
        return frame

    def unit_frame(self, report: CorpusReport) -> pd.DataFrame:
        report.sort()
        columns = UNIT_BASE_COLUMNS + [f"{m}_{policy_suffix(p)}" for p in report.policies for m in POLICY_METRICS]
        rows = []
        for unit in report.units:
            record = self.unit_record(unit, report.policies)
            row = {"unit": unit.path, "unit_kind": unit.kind, "language": unit.language,
                   "scope_count": len(unit.scopes), "empty_scope_count": len(unit.empty_scopes)}
            row.update(record["totals"])
            row.update(record["doc_stats"])
            rows.append(row)
        return pd.DataFrame(rows, columns=columns)

    def aggregates_frame(self, report: CorpusReport) -> pd.DataFrame:
        rows = []
        for level, metrics in self.aggregates(report).items():
            for metric, summary in metrics.items():
                rows.append({"level": level, "metric": metric, **summary})
        return pd.DataFrame(rows, columns=["level", "metric", "n", "min", "q25", "median", "mean", "q75", "max"])

    def excluded_frame(self, report: CorpusReport) -> pd.DataFrame:
        report.sort()
        return pd.DataFrame([e.to_dict() for e in report.excluded], columns=["path", "reason", "message"])

    def doc_stats_frame(self, report: CorpusReport) -> pd.DataFrame:
        report.sort()
        columns = ["unit", "unit_kind"] + list(DocStats().to_dict())
        rows = [{"unit": u.path, "unit_kind": u.kind, **u.doc_stats.to_dict()} for u in report.units]
        return pd.DataFrame(rows, columns=columns)

    def to_csv(self, reports: Sequence[CorpusReport]) -> str:
        """Scope rows of one or more corpora; a root column is added for several"""
        frames = [self.scope_frame(r, root_column=len(reports) > 1) for r in reports]
        frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
        return frame.to_csv(index=False, lineterminator="\n")

    def doc_stats_document(self, reports: Sequence[CorpusReport]) -> Dict[str, Any]:
        """Documentation statistics of one or more corpora with their distributions"""
        corpora = []
        for report in reports:
            report.sort()
            corpora.append({
                "root": report.root,
                "units": [{"path": u.path, "kind": u.kind, "doc_stats": u.doc_stats.to_dict()} for u in report.units],
                "excluded": [e.to_dict() for e in report.excluded],
                "aggregates": {
                    metric: aggregate_stats([getattr(u.doc_stats, metric) for u in report.units]).to_dict()
                    for metric in DocStats().to_dict()
                },
            })
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": reports[0].tool_version if reports else None,
            "corpora": corpora,
        }

    def clone_document(self, clones: CloneReport, roots: Sequence[str], config: Dict[str, Any],
                       tool_version: str, excluded: Sequence[ExcludedUnit] = ()) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": tool_version,
            "roots": list(roots),
            "config": config,
            "excluded": [e.to_dict() for e in sorted(excluded, key=lambda e: e.path)],
            "clones": clones.to_dict(),
        }

    def clone_frame(self, clones: CloneReport) -> pd.DataFrame:
        """One row per clone instance, block classes first"""
        high_impact = {c.id for c in clones.high_impact}
        classes = list(clones.block_classes)
        if clones.file_result is not None:
            classes += clones.file_result.classes
        rows = [
            {"class_id": c.id, "granularity": c.granularity.value, "high_impact": c.id in high_impact,
             "min_similarity": c.min_similarity, "unit": f.unit, "start_line": f.start_line,
             "end_line": f.end_line, "normalized_line_count": f.size}
            for c in classes for f in c.instances
        ]
        return pd.DataFrame(rows, columns=CLONE_COLUMNS)

    @staticmethod
    def frame_csv(frame: pd.DataFrame) -> str:
        return frame.to_csv(index=False, lineterminator="\n")
