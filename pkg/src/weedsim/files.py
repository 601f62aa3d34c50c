"""Plain-text file formats: fields, point sets, routes, raster regions, configs.

Point-style files carry one "x y" pair per line (meters, decimal); blank
lines and lines starting with '#' are ignored. The raster-region format is a
small header followed by run-length-encoded rows.
"""

import math

import numpy as np

from .errors import IngestError
from .geometry import Field, RasterRegion
from .pointproc import PointPattern


def _read_xy(path):
    rows = []
    try:
        lines = open(path).read().splitlines()
    except OSError as e:
        raise IngestError(str(e), path=path)
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != 2:
            raise IngestError("expected 'x y'", path=path, line=lineno)
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise IngestError("expected two decimal numbers", path=path, line=lineno)
    return np.asarray(rows, dtype=np.float64).reshape(-1, 2)


def read_field(path, grid_step=0.05):
    vertices = _read_xy(path)
    if vertices.shape[0] < 3:
        raise IngestError("a field polygon needs at least 3 vertices", path=path)
    try:
        return Field(boundary=vertices, grid_step=grid_step)
    except ValueError as e:
        raise IngestError(str(e), path=path)


def read_points(path, role="observed"):
    return PointPattern(locations=_read_xy(path), role=role)


def write_points(path, points):
    if hasattr(points, "locations"):
        points = points.locations
    with open(path, "w") as fh:
        for x, y in points:
            fh.write(f"{format(x, '.10g')} {format(y, '.10g')}\n")


write_route = write_points
read_route = _read_xy


def write_region(path, region):
    """Raster mask as a header plus run-length-encoded rows ('-' when empty)."""
    ny, nx = region.mask.shape
    with open(path, "w") as fh:
        fh.write(f"origin {format(region.origin[0], '.10g')} {format(region.origin[1], '.10g')}\n")
        fh.write(f"step {format(region.step, '.10g')}\n")
        fh.write(f"dims {nx} {ny}\n")
        for row in region.mask:
            runs = []
            idx = np.flatnonzero(np.diff(np.concatenate(([0], row.view(np.int8), [0]))))
            for start, stop in zip(idx[::2], idx[1::2]):
                runs.append(f"{start}:{stop - start}")
            fh.write((" ".join(runs) if runs else "-") + "\n")


def read_region(path):
    try:
        lines = open(path).read().splitlines()
    except OSError as e:
        raise IngestError(str(e), path=path)
    try:
        _, ox, oy = lines[0].split()
        _, step = lines[1].split()
        _, nx, ny = lines[2].split()
        nx, ny = int(nx), int(ny)
        mask = np.zeros((ny, nx), dtype=bool)
        for j in range(ny):
            text = lines[3 + j].strip()
            if text == "-":
                continue
            for run in text.split():
                start, length = run.split(":")
                mask[j, int(start) : int(start) + int(length)] = True
    except (IndexError, ValueError) as e:
        raise IngestError(f"malformed region file: {e}", path=path)
    return RasterRegion(
        origin=np.array([float(ox), float(oy)]), step=float(step), mask=mask
    )


def parse_config(path):
    """Flat 'key = value' config with '[section]' headers.

    Returns an ordered list of (section_name, dict); repeated section names
    are allowed and kept separate. Values stay strings; callers coerce.
    """
    sections = []
    current = None
    try:
        lines = open(path).read().splitlines()
    except OSError as e:
        raise IngestError(str(e), path=path)
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text.startswith("[") and text.endswith("]"):
            current = (text[1:-1].strip(), {})
            sections.append(current)
            continue
        if "=" not in text:
            raise IngestError("expected 'key = value'", path=path, line=lineno)
        if current is None:
            current = ("", {})
            sections.append(current)
        key, _, value = text.partition("=")
        current[1][key.strip()] = value.strip()
    return sections


def parse_float(value):
    if value.lower() in ("inf", "infinity", "+inf"):
        return math.inf
    return float(value)
