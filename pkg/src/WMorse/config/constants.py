# src/WMorse/config/constants.py

# ---- Whittaker evaluation ----
ODE_TOL = 1e-11
SEED_TOL = 1e-13
SEED_MAX_TERMS = 200
SEED_CANCELLATION_LIMIT = 1e3  # largest series term relative to the sum
X_FAR_MIN = 40.0
X_FAR_STEP = 20.0
X_FAR_ATTEMPTS = 60
OVERFLOW_GUARD_X = 700.0
WHITTAKER_SEGMENT = 8.0      # inward integration is renormalised after each segment
WHITTAKER_RESIDUAL_TOL = 1e-7
RESIDUAL_GAUSS_NODES = 6

# ---- Quadrature ----
QUAD_TOL = 1e-10
QUAD_LIMIT = 400
TAIL_LOG_RATIO = 41.45       # ln(1e18): e^{-rho} rho^{2k-2} below 1e-18 of the peak
BESSEL_TAIL = 50.0           # x (cosh t - 1) cut-off for the K_{i nu} integral

# ---- Spectrum ----
ROOT_TOL = 1e-10
SCAN_MAX_STEP = 0.25
ENERGY_BAND = 1e-6           # |E| below this is not scanned (order parameter degenerates)
WINDOW_SAFETY_LEVELS = 3
WINDOW_EXTENSIONS = 4
MAX_ABS_X = 300.0

# ---- Finite-difference oracle ----
FD_MARGIN = 25.0
FD_TAIL_ACTION = 30.0
FD_TAIL_RATIO = 1e-10
FD_MIN_POINTS = 64
FD_DEFAULT_POINTS = 2000
RICHARDSON_ORDER_BOUNDS = (1.7, 2.3)
INVERSE_ITERATION_STEPS = 8
SHIFT_JITTER = 1e-9
STURM_PAD = 1e-12         # relative to the matrix norm

# ---- Deformations ----
EPS0 = 1e-3                  # |x| exclusion zone around the kink
LOGW_STEP = 2e-3
LOGW_CONVERGENCE_TOL = 1e-6
WRONSKIAN_ZERO_TOL = 1e-13

# ---- Analysis ----
WKB_GAUSS_NODES = 64
GRAM_THRESHOLD = 1e-6
DEFORMED_GRAM_THRESHOLD = 1e-5

# ---- CLI ----
DEFAULT_LEVELS = 8
DEFAULT_XMAX = 3.0
DEFAULT_SAMPLES = 601
THREADS_ENV = "WMORSE_THREADS"
FLOAT_DIGITS = 17

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_LEVEL_RANGE = 4
EXIT_INADMISSIBLE = 5
