from malea.evaluation.coverage import CoverageReport, theme_coverage
from malea.evaluation.formats import (
    GoldRequirement, MappingRecord, read_gold, read_mapping, write_mapping,
)
from malea.evaluation.metrics import AggregateReport, MetricsReport, aggregate, compute_metrics
from malea.evaluation.report import MetricsRow, format_pct, render_aggregate, render_table, report_records
from malea.evaluation.suggest import suggest_mapping
from malea.evaluation.validate import Finding, validate_mapping

__all__ = [
    "GoldRequirement", "MappingRecord", "read_gold", "read_mapping", "write_mapping",
    "MetricsReport", "AggregateReport", "compute_metrics", "aggregate",
    "CoverageReport", "theme_coverage",
    "Finding", "validate_mapping",
    "MetricsRow", "render_table", "render_aggregate", "report_records", "format_pct",
    "suggest_mapping",
]
