"""Curvature of concircularly semi-symmetric metric connections, checked numerically."""

from .catalog import CatalogEntry, builtin, load_manifest, sample_points
from .geometry import ManifoldInstance, PointGeometry
from .verify import CheckResult, SuiteReport, Tolerances, run_suites

__all__ = [
    "CatalogEntry",
    "CheckResult",
    "ManifoldInstance",
    "PointGeometry",
    "SuiteReport",
    "Tolerances",
    "builtin",
    "load_manifest",
    "run_suites",
    "sample_points",
]
