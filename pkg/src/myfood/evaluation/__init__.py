"""Experiment running, report files, overlays, and detection grading."""

from .grading import (DEFAULT_MIN_OVERLAP, GRADES, Grade, comparison_table,
                      grade_prediction)
from .overlay import class_color, render_overlay
from .runner import (ExperimentResult, ExperimentSpec, per_class_breakdown,
                     run_experiment)

__all__ = [
    "DEFAULT_MIN_OVERLAP", "GRADES", "Grade", "comparison_table", "grade_prediction",
    "class_color", "render_overlay", "ExperimentResult", "ExperimentSpec",
    "per_class_breakdown", "run_experiment",
]
