"""Command line interface.

Subcommands: generate (sample a pattern), treat (plan a treatment for a
points file), evaluate (score a ground truth against plan files), sweep (run
a scenario grid from a config file), paper-suite (run the built-in study
grid).
"""

import math
import sys
from pathlib import Path

import click
import numpy as np

from . import data, defaults, files, harness, metrics, pointproc, strategy
from .errors import WeedSimError
from .geometry import contains
from .pointproc import PointPattern


def _load_field(field_path, grid_step=defaults.GRID_STEP):
    if field_path:
        return files.read_field(field_path, grid_step=grid_step)
    return data.standin_field(grid_step=grid_step)


def _config_sections(config_path):
    if not config_path:
        return []
    return files.parse_config(config_path)


def _section(sections, name):
    for sec_name, values in sections:
        if sec_name == name:
            return values
    return {}


def _parse_pairs(pairs):
    out = []
    for text in pairs:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2 or any(p not in harness.MEASURES for p in parts):
            raise click.BadParameter(
                f"--pair wants two of {', '.join(harness.MEASURES)}, got {text!r}"
            )
        out.append((parts[0], parts[1]))
    return out


@click.group()
def main():
    """Weed treatment simulation toolkit."""


@main.command()
@click.option("--field", "field_path", type=click.Path(exists=True), default=None,
              help="Field polygon file (default: built-in stand-in field).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Config file with a [model] section.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Output points file.")
def generate(field_path, config_path, seed, out_path):
    """Sample a ground-truth point pattern from an intensity model."""
    field = _load_field(field_path)
    cfg = _section(_config_sections(config_path), "model")
    kind = cfg.get("kind", "hom")
    factor = files.parse_float(cfg.get("intensity_factor", "1"))
    n_ref = int(cfg.get("reference_count", defaults.REFERENCE_COUNT))
    params = {}
    if kind == "cal":
        anchors = (
            files.read_points(cfg["anchors"], role="ground_truth")
            if "anchors" in cfg
            else data.standin_anchors(n_ref)
        )
        if "bandwidth" in cfg:
            h = files.parse_float(cfg["bandwidth"])
        else:
            h = pointproc.select_bandwidth(
                anchors, field, harness.derive_seed(seed, "cal-bandwidth", 0)
            )
        params = {"anchors": anchors.locations, "bandwidth": h}
    elif kind == "cen":
        params = {"sigma": defaults.CEN_SIGMA}
    elif kind == "sin":
        params = {"wavelength": defaults.SIN_WAVELENGTH}
    model = pointproc.make_model(
        kind, field, intensity_factor=factor, reference_count=n_ref, **params
    )
    model = pointproc.normalize(model, field)
    pattern = pointproc.sample_poisson(model, field, seed)
    files.write_points(out_path, pattern)
    click.echo(f"wrote {len(pattern)} points to {out_path}")


def _strategy_from_config(cfg):
    tool = cfg.get("tool", "robot")
    if tool == "robot":
        radius = files.parse_float(cfg.get("radius", cfg.get("tool_param", "0.2")))
        return tool, strategy.RobotConfig(treatment_radius=radius)
    if tool == "tractor":
        sections = int(float(cfg.get("sections", cfg.get("tool_param", "10"))))
        tl = cfg.get("treatment_length")
        return tool, strategy.TractorConfig(
            meander_width=files.parse_float(cfg.get("meander_width", str(defaults.MEANDER_WIDTH))),
            sections=sections,
            treatment_length=files.parse_float(tl) if tl else None,
        )
    raise click.BadParameter(f"unknown tool {tool!r}")


def _record_lines(record):
    def fmt(v):
        return "undefined" if v is None else format(v, ".10g")

    return [
        f"driving_distance_m = {fmt(record.driving_distance)}",
        f"remaining_fraction = {fmt(record.remaining_fraction)}",
        f"max_remaining_density_per_m2 = {fmt(record.max_remaining_density)}",
        f"treated_area_fraction = {fmt(record.treated_area_fraction)}",
        f"area_per_treated_weed_m2 = {fmt(record.area_per_treated_weed)}",
        f"n_ground = {record.n_ground}",
        f"n_observed = {record.n_observed}",
        f"n_targeted = {record.n_targeted}",
        f"n_treated = {record.n_treated}",
    ]


@main.command()
@click.argument("points_path", type=click.Path(exists=True))
@click.option("--field", "field_path", type=click.Path(exists=True), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Config file with a [strategy] section.")
@click.option("--out", "out_dir", type=click.Path(), required=True,
              help="Output directory for route, region, and metrics files.")
def treat(points_path, field_path, config_path, out_dir):
    """Plan a treatment for the observed locations in POINTS_PATH.

    Writes route.txt, region.txt, and metrics.txt; the metrics score the
    plan against the input locations taken as the full weed population.
    """
    field = _load_field(field_path)
    cfg = _section(_config_sections(config_path), "strategy")
    observed = files.read_points(points_path, role="observed")
    threshold = files.parse_float(cfg.get("action_threshold", "inf"))
    targeted = strategy.action_threshold(observed, threshold)
    tool, tool_cfg = _strategy_from_config(cfg)
    x0 = field.start_point()
    if tool == "robot":
        plan = strategy.plan_robot(targeted, tool_cfg, field, x0)
    else:
        plan = strategy.plan_tractor(targeted, tool_cfg, field, x0)
    gt = PointPattern(locations=observed.locations.copy(), role="ground_truth")
    record = metrics.compute_metrics(gt, plan, field, n_observed=len(observed))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files.write_route(out / "route.txt", plan.route)
    files.write_region(out / "region.txt", plan.treated_region)
    (out / "metrics.txt").write_text("\n".join(_record_lines(record)) + "\n")
    click.echo(f"targeted {len(targeted)} of {len(observed)} points; "
               f"d_d = {format(plan.driving_distance, '.6g')} m")


@main.command()
@click.argument("ground_truth_path", type=click.Path(exists=True))
@click.argument("route_path", type=click.Path(exists=True))
@click.argument("region_path", type=click.Path(exists=True))
@click.option("--field", "field_path", type=click.Path(exists=True), default=None)
@click.option("--targets", "targets_path", type=click.Path(exists=True), default=None,
              help="Targeted locations, if known (affects only the reported count).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Also write the metrics to this file.")
def evaluate(ground_truth_path, route_path, region_path, field_path, targets_path, out_path):
    """Score GROUND_TRUTH against a stored plan (route + region files)."""
    field = _load_field(field_path)
    gt = files.read_points(ground_truth_path, role="ground_truth")
    route = files.read_route(route_path)
    region = files.read_region(region_path)
    targeted = (
        files.read_points(targets_path, role="targeted")
        if targets_path
        else PointPattern(locations=np.empty((0, 2)), role="targeted")
    )
    plan = strategy.TreatmentPlan(
        route=route,
        driving_distance=strategy.polyline_length(route),
        treated_region=region,
        targeted=targeted,
    )
    record = metrics.compute_metrics(gt, plan, field)
    text = "\n".join(_record_lines(record)) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text, nl=False)


def _scenario_from_section(values, base, seed, reps, field_path):
    cfg = dict(base)
    cfg.update(values)
    tool = cfg.get("tool", "robot")
    if tool == "robot":
        param = files.parse_float(cfg.get("radius", cfg.get("tool_param", "0.2")))
    else:
        param = float(int(float(cfg.get("sections", cfg.get("tool_param", "10")))))
    tl = cfg.get("treatment_length")
    return harness.ScenarioConfig(
        model=cfg.get("model", "hom"),
        tool=tool,
        tool_param=param,
        intensity_factor=files.parse_float(cfg.get("intensity_factor", "1")),
        observation=cfg.get("observation", "obs1"),
        action_threshold=files.parse_float(cfg.get("action_threshold", "inf")),
        meander_width=files.parse_float(cfg.get("meander_width", str(defaults.MEANDER_WIDTH))),
        treatment_length=files.parse_float(tl) if tl else None,
        replications=reps if reps is not None else int(cfg.get("replications", defaults.REPLICATIONS)),
        base_seed=seed,
        field_file=field_path,
        points_file=cfg.get("points"),
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="Config file with one [scenario] section per scenario.")
@click.option("--field", "field_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--reps", type=int, default=None, help="Override replication count.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--pair", "pairs", multiple=True,
              help="Measure pair for frontier CSVs, e.g. d_d,A_eff. Repeatable.")
def sweep(config_path, field_path, seed, reps, out_dir, threads, pairs):
    """Run a scenario grid from a config file."""
    sections = _config_sections(config_path)
    base = _section(sections, "defaults")
    configs = [
        _scenario_from_section(values, base, seed, reps, field_path)
        for name, values in sections
        if name == "scenario"
    ]
    if not configs:
        raise click.ClickException("no [scenario] sections in config")
    rows = harness.sweep(configs, out_dir, pairs=_parse_pairs(pairs), threads=threads)
    click.echo(f"wrote {len(rows)} scenario rows to {Path(out_dir) / 'results.csv'}")


@main.command("paper-suite")
@click.option("--field", "field_path", type=click.Path(exists=True), default=None)
@click.option("--points", "points_path", type=click.Path(exists=True), default=None,
              help="Measured weed locations; adds the ingested-data scenarios.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--reps", type=int, default=defaults.REPLICATIONS, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--pair", "pairs", multiple=True,
              help="Measure pairs; defaults to the built-in study pairs.")
def paper_suite(field_path, points_path, seed, reps, out_dir, threads, pairs):
    """Run the built-in study grid and write result, frontier, and plot CSVs."""
    pair_list = _parse_pairs(pairs) if pairs else harness.DEFAULT_PAIRS
    rows = harness.paper_suite(
        out_dir,
        base_seed=seed,
        replications=reps,
        threads=threads,
        field_file=field_path,
        points_file=points_path,
        pairs=pair_list,
    )
    click.echo(f"wrote {len(rows)} scenario rows to {Path(out_dir) / 'results.csv'}")


def run():
    try:
        main(standalone_mode=True)
    except WeedSimError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
