"""
Toolkit Configuration
Tolerances, documented size limits and experiment profiles.
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

VERSION = "0.1.0"

# Output and logging
DEFAULT_OUTPUT_DIR = "./lipfree_reports"
OUTPUT_DIR = os.getenv('LIPFREE_OUTPUT_DIR', DEFAULT_OUTPUT_DIR)
LOG_LEVEL = os.getenv('LIPFREE_LOG_LEVEL', 'INFO').upper()
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Numerical tolerances (renorm_l2 only; everything else is exact)
NORM_GAP_TOL = float(os.getenv('LIPFREE_NORM_GAP_TOL', '1e-7'))
SANDWICH_SLACK = float(os.getenv('LIPFREE_SANDWICH_SLACK', '1e-9'))
BILINEAR_SLACK = 1e-6
MEMBERSHIP_ATOL = 1e-12
SOLVER = os.getenv('LIPFREE_SOLVER', 'CLARABEL').upper()
SOLVER_OPTIONS = {
    "CLARABEL": {"tol_gap_abs": 1e-10, "tol_gap_rel": 1e-10, "tol_feas": 1e-10},
}
SCALAR_SEARCH_XATOL = 1e-12
SCALAR_SEARCH_GRID = 65

# Feature flags
STRICT_ASSERTIONS = os.getenv('LIPFREE_STRICT_ASSERTIONS', 'true').lower() == 'true'

# Documented size limits
SVC_MAX_DEPTH = 10
VEEORG_MAX_LEVELS = 8
VEEORG_EXHAUSTIVE_LEVELS = 5
VEEORG_TRIANGLE_SAMPLES = 20000
BRUTE_FORCE_B_MAX_POINTS = 6
BRUTE_FORCE_KR_MAX_POINTS = 5
RENORM_MAX_DIM = 4096
RENORM_ORACLE_MAX_DIM = 3

# Slice sampler defaults
SLICE_SAMPLES = 400
SLICE_SIGMAS = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5)

# Experiment defaults, overridden per profile and then by the --config file
EXPERIMENT_DEFAULTS = {
    "seed": 20240601,
    "random_spaces": 500,
    "random_space_max_points": 6,
    "alphas": ["1/4", "1/2", "3/4"],
    "grid_sizes": [8, 16, 64],
    "svc_depths": [1, 2],
    "veeorg_levels": 5,
    "veeorg_probe_levels": [2, 3, 4, 5, 6],
    "cover": {"alpha": "2/5", "beta": "1/5"},
    "probe_alpha": "3/10",
    "renorm_dim": 112,
    "renorm_random_vectors": 1000,
    "renorm_random_max_dim": 32,
    "lemma32_n": [1, 2, 3],
    "slice_deltas": [1e-1, 1e-2, 1e-3, 1e-4],
    "slice_samples": SLICE_SAMPLES,
    "scan_eps": ["1", "1/4", "1/32"],
    "kr_spaces": 12,
    "oracle_vectors": 20,
    "witness_dim": 16,
}

PROFILES = {
    "quick": {
        "random_spaces": 50,
        "grid_sizes": [8, 16],
        "veeorg_levels": 3,
        "veeorg_probe_levels": [2, 3, 4],
        "renorm_random_vectors": 50,
        "renorm_random_max_dim": 8,
        "slice_samples": 120,
        "kr_spaces": 4,
        "oracle_vectors": 6,
        "witness_dim": 6,
        "description": "Reduced sizes for smoke runs",
    },
    "acceptance": {
        "description": "Sizes used by the acceptance suites",
    },
}


def get_config(profile: str = "acceptance") -> dict:
    """Get experiment parameters for a profile."""
    if profile not in PROFILES:
        from .errors import ConfigError
        raise ConfigError(f"Unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    profile_config = PROFILES[profile]
    config = EXPERIMENT_DEFAULTS.copy()
    config.update(profile_config)
    config.pop("description", None)
    return config
