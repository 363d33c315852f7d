"""Per-class segmentation metrics and mean(std) aggregation."""

from .core import (METRIC_NAMES, UNDEFINED_METRICS, ConfusionCounts, MetricValues,
                   balanced_accuracy, confusion, evaluate_image, iou, metric_values,
                   ppv, sensitivity, specificity)
from .report import (OVERALL_LABEL, TABLE_COLUMNS, AggregateReport, MetricStat,
                     aggregate, format_mean_std, format_std, format_table, report_csv)

__all__ = [
    "METRIC_NAMES", "UNDEFINED_METRICS", "ConfusionCounts", "MetricValues",
    "balanced_accuracy", "confusion", "evaluate_image", "iou", "metric_values",
    "ppv", "sensitivity", "specificity", "OVERALL_LABEL", "TABLE_COLUMNS",
    "AggregateReport", "MetricStat", "aggregate", "format_mean_std", "format_std",
    "format_table", "report_csv",
]
