"""Scenario orchestration: replications, aggregation, sweeps, persistence.

A scenario fixes the ground-truth source, observation date, action threshold,
and tool configuration. Replication k of a scenario runs on a seed derived
from (base_seed, dataset label, k), where the dataset label excludes the
action threshold and the tool: scenarios that differ only in those share
ground-truth and observation draws, mirroring how the case study applies all
strategies to the same datasets.
"""

import hashlib
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import data, defaults, files, metrics, observe, pareto, pointproc, strategy
from .errors import AggregationMismatch, IngestError
from .geometry import rasterize_disks, rasterize_rects

MEASURES = ("d_d", "f_r", "rho2", "A_t", "A_eff")

RESULT_COLUMNS = [
    "scenario_id", "model", "intensity_factor", "observation",
    "action_threshold_m", "tool", "tool_param", "replications",
    "mean_d_d_m", "sd_d_d_m", "mean_f_r", "sd_f_r",
    "mean_rho2_per_m2", "sd_rho2_per_m2", "mean_A_t", "sd_A_t",
    "mean_A_eff_m2", "sd_A_eff_m2", "A_eff_defined_count",
]

RUN_COLUMNS = [
    "scenario_id", "replication", "seed", "n_ground", "n_observed",
    "n_targeted", "n_treated", "d_d", "f_r", "rho2", "A_t", "A_eff",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x):
    """One splitmix64 step; the documented 64-bit seed mixer."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def label_hash(label):
    return int.from_bytes(
        hashlib.blake2b(label.encode(), digest_size=8).digest(), "little"
    )


def derive_seed(base_seed, label, k):
    """Replication seed: splitmix64 mix of base seed, label hash, and index."""
    s = splitmix64((int(base_seed) ^ label_hash(label)) & _MASK64)
    return splitmix64((s ^ int(k)) & _MASK64)


def stage_seed(seed, stage):
    """Independent per-stage stream (sampling, thinning, ...) within one run."""
    return splitmix64((seed ^ ((stage * _GOLDEN) & _MASK64)) & _MASK64)


@dataclass
class ScenarioConfig:
    model: str  # cal | hom | cen | sin | ingested
    tool: str  # robot | tractor
    tool_param: float  # treatment radius (robot) or section count (tractor)
    intensity_factor: float = 1.0
    observation: str = "obs1"  # obs1 | obs2 | none
    action_threshold: float = math.inf  # m
    meander_width: float = defaults.MEANDER_WIDTH
    treatment_length: Optional[float] = None
    replications: int = defaults.REPLICATIONS
    base_seed: int = 0
    field_file: Optional[str] = None  # None: built-in stand-in field
    points_file: Optional[str] = None  # ingested ground truth / cal anchors
    grid_step: float = defaults.GRID_STEP
    reference_counts: tuple = (
        defaults.REFERENCE_COUNT,
        defaults.OBS1_COUNT,
        defaults.OBS2_COUNT,
    )
    cal_bandwidth: Optional[float] = None  # None: cross-validated selection

    def __post_init__(self):
        if self.model not in ("cal", "hom", "cen", "sin", "ingested"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.tool not in ("robot", "tractor"):
            raise ValueError(f"unknown tool {self.tool!r}")
        if self.observation not in ("obs1", "obs2", "none"):
            raise ValueError(f"unknown observation {self.observation!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.model != "ingested" and self.intensity_factor <= 0:
            raise ValueError("intensity factor must be positive")

    @property
    def scenario_id(self):
        la = "inf" if math.isinf(self.action_threshold) else format(self.action_threshold, "g")
        if self.tool == "robot":
            tool = f"robot{format(self.tool_param, 'g')}"
        else:
            tool = f"tractor{int(self.tool_param)}"
        return (
            f"{self.model}-lam{format(self.intensity_factor, 'g')}"
            f"-{self.observation}-la{la}-{tool}"
        )

    @property
    def dataset_label(self):
        # excludes tool and action threshold: those do not touch the data
        return f"{self.model}|{format(self.intensity_factor, 'g')}|{self.observation}"


@dataclass
class RunResult:
    scenario_id: str
    replication: int
    seed: int
    record: metrics.MetricsRecord
    duration: float


class Engine:
    """Caches the field, normalized models, and tool routes across runs."""

    def __init__(self, field=None, anchors=None):
        self.field = field if field is not None else data.standin_field()
        self.anchors = anchors
        self._models = {}
        self._bandwidth = {}
        self._routes = {}
        self._layouts = {}

    @classmethod
    def for_config(cls, cfg):
        field = (
            files.read_field(cfg.field_file, grid_step=cfg.grid_step)
            if cfg.field_file
            else data.standin_field(grid_step=cfg.grid_step)
        )
        anchors = None
        if cfg.model in ("cal", "ingested"):
            anchors = (
                files.read_points(cfg.points_file, role="ground_truth")
                if cfg.points_file
                else data.standin_anchors(cfg.reference_counts[0])
            )
        return cls(field=field, anchors=anchors)

    def model_for(self, cfg):
        key = (cfg.model, cfg.intensity_factor, cfg.reference_counts, cfg.cal_bandwidth)
        if key not in self._models:
            params = {}
            if cfg.model == "cal":
                h = cfg.cal_bandwidth
                if h is None:
                    bw_key = cfg.base_seed
                    if bw_key not in self._bandwidth:
                        self._bandwidth[bw_key] = pointproc.select_bandwidth(
                            self.anchors,
                            self.field,
                            derive_seed(cfg.base_seed, "cal-bandwidth", 0),
                        )
                    h = self._bandwidth[bw_key]
                params = {"anchors": self.anchors.locations, "bandwidth": h}
            elif cfg.model == "cen":
                params = {"sigma": defaults.CEN_SIGMA}
            elif cfg.model == "sin":
                params = {"wavelength": defaults.SIN_WAVELENGTH}
            model = pointproc.make_model(
                cfg.model,
                self.field,
                intensity_factor=cfg.intensity_factor,
                reference_count=cfg.reference_counts[0],
                **params,
            )
            self._models[key] = pointproc.normalize(model, self.field)
        return self._models[key]

    def _ground_truth(self, cfg, seed):
        if cfg.model == "ingested":
            return self.anchors.with_role("ground_truth")
        return pointproc.sample_poisson(self.model_for(cfg), self.field, stage_seed(seed, 1))

    def _observed(self, cfg, gt, seed):
        if cfg.observation == "none":
            return gt.with_role("observed")
        n_ref, n1, n2 = cfg.reference_counts
        spec = (
            observe.ThinningSpec.obs1(n1, n_ref)
            if cfg.observation == "obs1"
            else observe.ThinningSpec.obs2(n2, n_ref)
        )
        return observe.thin(gt, spec, stage_seed(seed, 2))

    def _plan(self, cfg, targeted, cache_key):
        x0 = self.field.start_point()
        if cfg.tool == "robot":
            rcfg = strategy.RobotConfig(treatment_radius=cfg.tool_param)
            if len(targeted) == 0:
                return strategy.plan_robot(targeted, rcfg, self.field, x0)
            route = self._routes.get(cache_key)
            if route is None:
                route = strategy.robot_route(targeted.locations, x0)
                self._routes[cache_key] = route
            region = rasterize_disks(self.field, targeted, rcfg.treatment_radius)
            strategy._force_target_cells(region, self.field, targeted.locations)
            return strategy.TreatmentPlan(
                route=route,
                driving_distance=strategy.polyline_length(route),
                treated_region=region,
                targeted=targeted,
            )
        tcfg = strategy.TractorConfig(
            meander_width=cfg.meander_width,
            sections=int(cfg.tool_param),
            treatment_length=cfg.treatment_length,
        )
        if len(targeted) == 0:
            return strategy.plan_tractor(targeted, tcfg, self.field, x0)
        layout = self._layouts.get(cache_key)
        if layout is None:
            layout = strategy.tractor_layout(targeted, self.field, x0, tcfg.meander_width)
            self._layouts[cache_key] = layout
        rects, sources = strategy.tractor_rectangles(
            layout, targeted, tcfg.meander_width, tcfg.sections, tcfg.treatment_length
        )
        region = rasterize_rects(self.field, rects)
        strategy._force_target_cells(region, self.field, targeted.locations)
        return strategy.TreatmentPlan(
            route=layout.route,
            driving_distance=layout.driving_distance,
            treated_region=region,
            targeted=targeted,
            swath_of_target=layout.swath_of_target,
            rectangles=rects,
            rect_sources=sources,
        )

    def run_scenario(self, cfg):
        results = []
        for k in range(cfg.replications):
            start = time.perf_counter()
            seed = derive_seed(cfg.base_seed, cfg.dataset_label, k)
            gt = self._ground_truth(cfg, seed)
            obs = self._observed(cfg, gt, seed)
            targeted = strategy.action_threshold(obs, cfg.action_threshold)
            plan = self._plan(
                cfg,
                targeted,
                cache_key=(cfg.dataset_label, cfg.base_seed, k, cfg.action_threshold, cfg.tool),
            )
            record = metrics.compute_metrics(gt, plan, self.field, n_observed=len(obs))
            results.append(
                RunResult(
                    scenario_id=cfg.scenario_id,
                    replication=k,
                    seed=seed,
                    record=record,
                    duration=time.perf_counter() - start,
                )
            )
        return results


_ENGINES = {}


def _engine_for(cfg):
    key = (cfg.field_file, cfg.grid_step, cfg.points_file, cfg.reference_counts)
    engine = _ENGINES.get(key)
    if engine is None or (
        cfg.model in ("cal", "ingested") and engine.anchors is None
    ):
        engine = Engine.for_config(cfg)
        _ENGINES[key] = engine
    return engine


def run_scenario(cfg):
    """Run one scenario with a process-local cached engine."""
    return _engine_for(cfg).run_scenario(cfg)


def _measure_values(record):
    return {
        "d_d": record.driving_distance,
        "f_r": record.remaining_fraction,
        "rho2": record.max_remaining_density,
        "A_t": record.treated_area_fraction,
        "A_eff": record.area_per_treated_weed,
    }


def aggregate(results):
    """Mean (and sample sd) of each measure over one scenario's replications.

    Undefined values are excluded measure-wise; the defined count for A_eff is
    reported so downstream consumers can tell partial from full coverage.
    """
    if not results:
        raise ValueError("need at least one run result")
    ids = {r.scenario_id for r in results}
    if len(ids) != 1:
        raise AggregationMismatch(f"mixed scenario ids: {sorted(ids)}")
    stats = {}
    defined_counts = {}
    for name in MEASURES:
        vals = [
            _measure_values(r.record)[name]
            for r in results
            if _measure_values(r.record)[name] is not None
        ]
        defined_counts[name] = len(vals)
        if vals:
            mean = float(np.mean(vals))
            sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
            stats[name] = (mean, sd)
        else:
            stats[name] = (None, None)
    outcome = pareto.StrategyOutcome(
        strategy_id=results[0].scenario_id,
        measures={name: stats[name][0] for name in MEASURES},
    )
    return outcome, stats, defined_counts


def _fmt(x):
    return "" if x is None else format(x, ".10g")


def _fmt_exact(x):
    # .17g round-trips float64 exactly; runs files must re-aggregate to the
    # very same aggregate rows
    return "" if x is None else format(x, ".17g")


def result_row(cfg, results):
    outcome, stats, defined = aggregate(results)
    la = "inf" if math.isinf(cfg.action_threshold) else format(cfg.action_threshold, "g")
    row = [
        cfg.scenario_id,
        cfg.model,
        format(cfg.intensity_factor, "g"),
        cfg.observation,
        la,
        cfg.tool,
        format(cfg.tool_param, "g"),
        str(cfg.replications),
        _fmt(stats["d_d"][0]), _fmt(stats["d_d"][1]),
        _fmt(stats["f_r"][0]), _fmt(stats["f_r"][1]),
        _fmt(stats["rho2"][0]), _fmt(stats["rho2"][1]),
        _fmt(stats["A_t"][0]), _fmt(stats["A_t"][1]),
        _fmt(stats["A_eff"][0]), _fmt(stats["A_eff"][1]),
        str(defined["A_eff"]),
    ]
    return row, outcome


def write_results_csv(path, rows):
    with open(path, "w") as fh:
        fh.write(",".join(RESULT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_runs_csv(path, all_results):
    with open(path, "w") as fh:
        fh.write(",".join(RUN_COLUMNS) + "\n")
        for r in all_results:
            m = _measure_values(r.record)
            fh.write(
                ",".join(
                    [
                        r.scenario_id,
                        str(r.replication),
                        str(r.seed),
                        str(r.record.n_ground),
                        str(r.record.n_observed),
                        str(r.record.n_targeted),
                        str(r.record.n_treated),
                        _fmt_exact(m["d_d"]), _fmt_exact(m["f_r"]),
                        _fmt_exact(m["rho2"]), _fmt_exact(m["A_t"]),
                        _fmt_exact(m["A_eff"]),
                    ]
                )
                + "\n"
            )


def read_runs_csv(path):
    """Parse a runs CSV back into RunResult values (durations are lost)."""
    lines = open(path).read().splitlines()
    if not lines or lines[0] != ",".join(RUN_COLUMNS):
        raise IngestError("unexpected runs CSV header", path=path)
    out = []
    for line in lines[1:]:
        cells = line.split(",")
        rec = metrics.MetricsRecord(
            driving_distance=float(cells[7]),
            remaining_fraction=float(cells[8]) if cells[8] else None,
            max_remaining_density=float(cells[9]) if cells[9] else None,
            treated_area_fraction=float(cells[10]) if cells[10] else None,
            area_per_treated_weed=float(cells[11]) if cells[11] else None,
            n_ground=int(cells[3]),
            n_observed=int(cells[4]),
            n_targeted=int(cells[5]),
            n_treated=int(cells[6]),
        )
        out.append(
            RunResult(
                scenario_id=cells[0],
                replication=int(cells[1]),
                seed=int(cells[2]),
                record=rec,
                duration=0.0,
            )
        )
    return out


def sweep(configs, out_dir, pairs=(), threads=1):
    """Run all scenarios, write runs/results CSVs and frontier CSVs.

    Scenario failures are recorded in failures.txt and do not stop the sweep.
    Output order is independent of execution order, so multi-process runs
    produce byte-identical files.
    """
    if not configs:
        raise ValueError("empty scenario grid")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    outputs = {}
    failures = []
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for cfg, res in zip(configs, pool.map(_run_scenario_safe, configs)):
                outputs[cfg.scenario_id] = (cfg, res)
    else:
        for cfg in configs:
            outputs[cfg.scenario_id] = (cfg, _run_scenario_safe(cfg))
    rows = []
    all_results = []
    outcomes = []
    for sid in sorted(outputs):
        cfg, res = outputs[sid]
        if isinstance(res, Exception):
            failures.append(f"{sid}: {res!r}")
            continue
        row, outcome = result_row(cfg, res)
        rows.append(row)
        outcomes.append((cfg, outcome))
        all_results.extend(sorted(res, key=lambda r: r.replication))
    write_results_csv(out_dir / "results.csv", rows)
    write_runs_csv(out_dir / "runs.csv", all_results)
    for m1, m2 in pairs:
        for model in sorted({cfg.model for cfg, _ in outcomes}):
            group = [o for cfg, o in outcomes if cfg.model == model]
            usable = [
                o for o in group
                if all(o.measures.get(m) is not None for m in (m1, m2))
            ]
            if not usable:
                continue
            result = pareto.pareto_front(usable, m1, m2)
            pareto.write_frontier_csv(
                out_dir / f"frontier_{m1}_{m2}_{model}.csv", usable, m1, m2, result
            )
    if failures:
        (out_dir / "failures.txt").write_text("\n".join(failures) + "\n")
    durations = [
        f"{r.scenario_id},{r.replication},{format(r.duration, '.6g')}"
        for r in all_results
    ]
    (out_dir / "metadata.txt").write_text(
        f"started {started}\nwall_clock {time.time() - started:.3f}\n"
        + "\n".join(durations)
        + "\n"
    )
    return rows


def _run_scenario_safe(cfg):
    try:
        return run_scenario(cfg)
    except Exception as e:  # recorded per scenario; the sweep continues
        return e


def paper_suite_grid(base_seed=0, replications=defaults.REPLICATIONS,
                     field_file=None, points_file=None, include_ingested=False):
    """The built-in scenario grid of the case study.

    Strategy comparison: four simulated models x three action thresholds x six
    tool configurations at the early observation and unit intensity. Plus the
    late-observation comparison and the intensity-factor sweep for the two
    reference tool configurations (robot 0.2 m, tractor 10 sections).
    """
    models = ["cal", "hom", "cen", "sin"]
    if include_ingested:
        models = models + ["ingested"]
    tools = [("robot", r) for r in defaults.ROBOT_RADII] + [
        ("tractor", float(n)) for n in defaults.TRACTOR_SECTIONS
    ]
    reference_tools = [("robot", 0.2), ("tractor", 10.0)]
    common = dict(
        base_seed=base_seed,
        replications=replications,
        field_file=field_file,
        points_file=points_file,
    )
    grid = []
    for model in models:
        for la in defaults.ACTION_THRESHOLDS:
            for tool, param in tools:
                grid.append(
                    ScenarioConfig(
                        model=model, tool=tool, tool_param=param,
                        observation="obs1", action_threshold=la, **common,
                    )
                )
        for tool, param in reference_tools:
            grid.append(
                ScenarioConfig(
                    model=model, tool=tool, tool_param=param,
                    observation="obs2", action_threshold=math.inf, **common,
                )
            )
        if model == "ingested":
            continue  # the intensity factor only applies to simulated data
        for lam in (0.5, 2.0):
            for tool, param in reference_tools:
                grid.append(
                    ScenarioConfig(
                        model=model, tool=tool, tool_param=param,
                        intensity_factor=lam, observation="obs1",
                        action_threshold=math.inf, **common,
                    )
                )
    return grid


DEFAULT_PAIRS = (("d_d", "A_eff"), ("f_r", "A_eff"), ("A_t", "rho2"))

_MEAN_COLUMN = {
    "d_d": "mean_d_d_m",
    "f_r": "mean_f_r",
    "rho2": "mean_rho2_per_m2",
    "A_t": "mean_A_t",
    "A_eff": "mean_A_eff_m2",
}

_REFERENCE_TOOLS = (("robot", "0.2"), ("tractor", "10"))


def write_plot_data(out_dir, rows, pairs=DEFAULT_PAIRS):
    """Per-study plot CSVs derived from aggregated rows.

    One scatter CSV per requested measure pair (strategy comparison panels,
    early observation, unit intensity), plus long-format CSVs for the action
    threshold, observation date, and intensity factor studies.
    """
    out_dir = Path(out_dir)
    idx = {c: i for i, c in enumerate(RESULT_COLUMNS)}

    def get(row, col):
        return row[idx[col]]

    def is_reference_tool(row):
        return (get(row, "tool"), get(row, "tool_param")) in _REFERENCE_TOOLS

    mean_cols = list(_MEAN_COLUMN.values())
    base = [r for r in rows if get(r, "observation") == "obs1"
            and get(r, "intensity_factor") == "1"]
    for m1, m2 in pairs:
        c1, c2 = _MEAN_COLUMN[m1], _MEAN_COLUMN[m2]
        scatter = [r for r in base if get(r, c1) != "" and get(r, c2) != ""]
        lines = [f"model,tool,tool_param,action_threshold_m,{m1},{m2},optimal"]
        for model in sorted({get(r, "model") for r in scatter}):
            group = [r for r in scatter if get(r, "model") == model]
            outcomes = [
                pareto.StrategyOutcome(
                    strategy_id=get(r, "scenario_id"),
                    measures={m1: float(get(r, c1)), m2: float(get(r, c2))},
                )
                for r in group
            ]
            result = pareto.pareto_front(outcomes, m1, m2)
            optimal_ids = {o.strategy_id for o in result.optimal}
            for r, o in zip(group, outcomes):
                flag = 1 if o.strategy_id in optimal_ids else 0
                lines.append(
                    ",".join(
                        [
                            model, get(r, "tool"), get(r, "tool_param"),
                            get(r, "action_threshold_m"),
                            get(r, c1), get(r, c2), str(flag),
                        ]
                    )
                )
        (out_dir / f"plot_pareto_{m1}_{m2}.csv").write_text("\n".join(lines) + "\n")

    def write_study(name, vary_col, selector):
        lines = [",".join(["model", "tool", "tool_param", vary_col] + mean_cols)]
        for r in rows:
            if not (is_reference_tool(r) and selector(r)):
                continue
            lines.append(
                ",".join(
                    [get(r, "model"), get(r, "tool"), get(r, "tool_param"),
                     get(r, vary_col)]
                    + [get(r, c) for c in mean_cols]
                )
            )
        (out_dir / name).write_text("\n".join(lines) + "\n")

    write_study(
        "plot_action_threshold.csv", "action_threshold_m",
        lambda r: get(r, "observation") == "obs1" and get(r, "intensity_factor") == "1",
    )
    write_study(
        "plot_observation_date.csv", "observation",
        lambda r: get(r, "action_threshold_m") == "inf"
        and get(r, "intensity_factor") == "1",
    )
    write_study(
        "plot_intensity_factor.csv", "intensity_factor",
        lambda r: get(r, "action_threshold_m") == "inf"
        and get(r, "observation") == "obs1"
        and get(r, "model") != "ingested",
    )


def paper_suite(out_dir, base_seed=0, replications=defaults.REPLICATIONS,
                threads=1, field_file=None, points_file=None, pairs=DEFAULT_PAIRS):
    grid = paper_suite_grid(
        base_seed=base_seed,
        replications=replications,
        field_file=field_file,
        points_file=points_file,
        include_ingested=points_file is not None,
    )
    if any(cfg.model == "cal" for cfg in grid):
        # select the calibration bandwidth once so workers do not repeat it
        probe = next(cfg for cfg in grid if cfg.model == "cal")
        engine = _engine_for(probe)
        h = engine._bandwidth.get(base_seed)
        if h is None:
            h = pointproc.select_bandwidth(
                engine.anchors, engine.field, derive_seed(base_seed, "cal-bandwidth", 0)
            )
            engine._bandwidth[base_seed] = h
        grid = [
            replace(cfg, cal_bandwidth=h) if cfg.model == "cal" else cfg
            for cfg in grid
        ]
    rows = sweep(grid, out_dir, pairs=pairs, threads=threads)
    write_plot_data(out_dir, rows, pairs=pairs)
    return rows
