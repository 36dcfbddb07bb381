"""
Configuration for the branched rough path toolkit.
Edit these values or override them at runtime through the CLI flags.
"""

import os
from pathlib import Path

# --- Trees ---
DEFAULT_ALPHABET_SIZE = 1    # number of driver labels d
MAX_FOREST_COUNT = 200_000   # enumeration refuses to build more forests than this

# --- Grid ---
DEFAULT_HORIZON = 1.0        # T of [0, T]
DEFAULT_GRID_SIZE = 256      # M, number of intervals
MAX_GRID_INTERVALS = 4096    # dense 2-increments are O(M^2)

# --- Lift ---
QUADRATURE_RULE = "simpson"  # or "trapezoid"
MAX_LIFT_CELLS = 50_000_000  # trees x (M+1)^2 stored floats

# --- Norms ---
RHO_SPLITS = 8               # 3-increment norm tries rho = j*mu/8, j = 1..7
HOLDER_ORDER_SLACK = 0.25    # pre-checks accept a measured order down to mu - slack
HOLDER_NOISE_FLOOR = 1e-12   # lag-profile entries below this count as zero
HOLDER_PRECHECK_FLOOR = 1e-4 # 3-increments smaller than this skip the order test

# --- RDE solver ---
FIXED_POINT_TOL = 1e-10      # Picard stop, measured in the controlled norm
MAX_PICARD_ITERS = 100       # per window
MAX_WINDOW_SPLITS = 12       # window halvings before giving up
FD_STEP = 1e-5               # central differences, exploratory use only

# --- Verification tolerances ---
IDENTITY_TOL = 1e-6          # lift of x_t = t vs (t-s)^|tau| / tau!
MULTIPLICATIVITY_TOL = 1e-6  # delta X^tau vs X^{Delta' tau}
SEWING_TOL = 1e-10           # delta(Lambda delta g) vs delta g
LAMBDA_SLACK = 0.05          # allowed excess over 1/(2^mu - 2)

# --- Output ---
SCHEMA_VERSION = 1
CACHE_DIR = Path(os.environ.get("BRANCHED_CACHE_DIR", Path.home() / ".cache" / "branched"))
LOG_FILE = CACHE_DIR / "branched.log"
