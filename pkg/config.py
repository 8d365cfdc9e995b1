# config.py

import os

from dotenv import load_dotenv
load_dotenv()


# ---------------- PROJECT ----------------
PROJECT_NAME = "EEQT Simulator"


# ---------------- LINEAR ALGEBRA ----------------
HERMITIAN_TOL = 1e-10
PSD_REL_TOL = 1e-10              # × trace(M)
NONFINITE_MESSAGE = "matrix or vector contains NaN or Inf"


# ---------------- MODEL ----------------
RATE_NEGATIVE_GUARD = 1e-12      # clamp λ ∈ [-guard, 0) to 0
UNIT_NORM_TOL = 1e-9
PROPAGATOR_CACHE_SIZE = 16       # distinct (sector, dt) propagators kept per interval


# ---------------- PDP ENGINE ----------------
DEFAULT_DT = 1e-3
LAMBDA_DT_WARN = 0.1
LAMBDA_DT_ERROR = 0.5
DEFAULT_MAX_EVENTS = 1_000_000
DEAD_BRANCH_NORM_SQ = 1e-300
FIXED_DT_CHUNK = 256             # no-jump steps evaluated per vectorized block

NORM_RK4_STEP_BOUND = 0.1        # ‖K‖·h ≤ this
DEFAULT_ODE_TOL = 1e-8
DEFAULT_ROOT_TOL = 1e-10

RNG_BLOCK_SIZE = 256             # uniform draws fetched per refill


# ---------------- MASTER ENGINE ----------------
MASTER_DEFAULT_DT = 1e-3
TRACE_DRIFT_TOL = 1e-8
STATE_HERMITIAN_TOL = 1e-9
POSITIVITY_TOL = 1e-7
EXPECTATION_IMAG_TOL = 1e-10


# ---------------- ENSEMBLE ----------------
DEFAULT_N_TRAJECTORIES = 20_000
COMPARE_SIGMAS = 3.0
HISTOGRAM_BIN_WIDTH = 0.1
KS_ALPHA = 0.01


# ---------------- OUTPUT ----------------
DEFAULT_OUTPUT_DIR = os.getenv("EEQT_OUTPUT_DIR", "runs")

DELIMITERS = {
    "csv": ",",
    "tsv": "\t",
}

EVENTS_COLUMNS = ["t", "from_alpha", "to_alpha"]
SNAPSHOT_COLUMNS = ["t", "alpha", "component", "re", "im"]
DENSITY_COLUMNS = ["t", "sector", "row", "col", "re", "im"]
REDUCED_COLUMNS = ["t", "row", "col", "re", "im"]
COMPARISON_COLUMNS = ["t", "trace_distance", "threshold"]
EVENT_STATS_COLUMNS = [
    "from_alpha",
    "to_alpha",
    "count",
    "mean_first_time",
    "var_first_time",
]

RUN_METADATA_FILE = "run_metadata.json"


# ---------------- EXIT CODES ----------------
EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_COMPARE_FAIL = 2
