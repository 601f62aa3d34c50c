"""Default study constants.

Reference counts come from the two drone observation dates (550 and 1792
flowers) and their 5 cm-merged union (2313 weeds); the grids below span the
scenario sweep of the case study.
"""

import math

import numpy as np

REFERENCE_COUNT = 2313  # merged ground-truth weed count
OBS1_COUNT = 550  # early observation date
OBS2_COUNT = 1792  # late observation date

INTENSITY_FACTORS = (0.5, 1.0, 2.0)
ACTION_THRESHOLDS = (2.5, 5.0, math.inf)  # m
ROBOT_RADII = (0.2, 0.4, 1.25)  # m
TRACTOR_SECTIONS = (1, 5, 10)
MEANDER_WIDTH = 2.5  # m; default treatment length is MEANDER_WIDTH / n_s

REPLICATIONS = 10

GRID_STEP = 0.05  # m, raster and density-scan pitch
DENSITY_DISK_RADIUS = 2.0  # m

# centered model: dispersion matrix in m^2; the mean is the field centroid
CEN_SIGMA = np.array([[218.8, 324.1], [324.1, 549.4]])

# sinusoidal model: wavelength in m; wave normal follows the long side of the
# field bounding box
SIN_WAVELENGTH = 28.3

# stand-in field: the real field polygon is not published; a rectangle with
# the same 8256 m^2 area stands in for it
STANDIN_FIELD_SIZE = (128.0, 64.5)
