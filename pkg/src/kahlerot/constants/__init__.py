from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
PROD_CONFIG_DIR = Path.home() / ".kahlerot"

SCHEMA_VERSION = "1"
VERSION = "0.1.0"

# --- Jets and domains ---
JET_ORDER = 4
PRIMITIVE_MARGIN = 1e-12
DIVISION_FLOOR = 1e-300
PD_THRESHOLD = 1e-10

# --- Legendre inversion ---
NEWTON_MAX_ITER = 100
NEWTON_MAX_HALVINGS = 60
NEWTON_TOL = 1e-12
GEODESIC_SUBSTEPS = 8

# --- MTW and certification ---
CROSS_DERIVATIVE_FLOOR = 1e-10
ORTHOGONALITY_TOL = 1e-10
VERDICT_TOL = 1e-9
CERTIFY_SAMPLES = 2000
CERTIFY_REFINEMENTS = 4
REFINE_STEPS = 200
REFINE_STEP = 1e-2
FD_STEP = 1e-6

# --- c-convexity ---
CONVEXITY_RESOLUTION = 32
CONVEXITY_TOL = 1e-9

# --- Transport ---
MASS_TOL = 1e-12
MARGINAL_TOL = 1e-9
SIMPLEX_TOL = 1e-13
SINKHORN_EPSILON = 1e-3
SINKHORN_MAX_ITERS = 10_000
SINKHORN_TOL = 1e-8
SLACKNESS_TOL = 1e-9
MONOTONICITY_TOL = 1e-10
MAP_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-10
