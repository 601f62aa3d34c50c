"""Simulation toolkit for site-specific weed treatment strategies.

Generates weed infestations on a bounded field from spatial point-process
models, applies virtual treatment tools (point-to-point robot, meandering
section-controlled tractor), scores them with five performance measures, and
compares strategies via Pareto frontiers.
"""

from .errors import WeedSimError
from .geometry import Field, OrientedBox, RasterRegion
from .harness import Engine, RunResult, ScenarioConfig, paper_suite, run_scenario, sweep
from .metrics import MetricsRecord, compute_metrics
from .observe import ThinningSpec, merge_close, thin
from .pareto import ParetoResult, StrategyOutcome, pareto_front
from .pointproc import (
    IntensityModel,
    PointPattern,
    make_model,
    normalize,
    sample_poisson,
    select_bandwidth,
)
from .strategy import (
    RobotConfig,
    TractorConfig,
    TreatmentPlan,
    action_threshold,
    plan_robot,
    plan_tractor,
)

__all__ = [
    "WeedSimError",
    "Field", "OrientedBox", "RasterRegion",
    "Engine", "RunResult", "ScenarioConfig", "paper_suite", "run_scenario", "sweep",
    "MetricsRecord", "compute_metrics",
    "ThinningSpec", "merge_close", "thin",
    "ParetoResult", "StrategyOutcome", "pareto_front",
    "IntensityModel", "PointPattern", "make_model", "normalize",
    "sample_poisson", "select_bandwidth",
    "RobotConfig", "TractorConfig", "TreatmentPlan",
    "action_threshold", "plan_robot", "plan_tractor",
]

__version__ = "0.1.0"
