"""Strategic-alignment analysis for four-layer enterprise architecture models."""
from importlib import resources

from .dsl import DslSyntaxError, ParseError, format_model, load, parse, parse_with_errors
from .interchange import from_interchange, to_interchange
from .maturity import MaturityLevel, link_ratio, maturity_level, maturity_table
from .metrics import (
    Assessment,
    LayerLink,
    MetricResult,
    Thresholds,
    evaluate_all,
    evaluate_metric,
    list_metrics,
)
from .model import (
    ElementRef,
    Kind,
    Model,
    ModelValidationError,
    check,
    leaf_activities,
    lookup,
    resolve,
)
from .report import Finding, Report, build_report, findings, render_dot, render_interchange, render_text

__version__ = "0.1.0"


def fixture_text(name: str = "data_capture.eam") -> str:
    """Text of a model shipped with the package."""
    return resources.files(__package__).joinpath("data", name).read_text(encoding="utf-8")
