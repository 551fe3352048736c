"""
Centralized numerical parameters for the LDOI toolkit
"""

# Tolerances
DEFAULT_ABS_EPS = 1e-10
DEFAULT_REL_EPS = 1e-9

# Averaging oracle
EXACT_AVERAGE_MAX_DIM = 12
MC_PHASE_BATCH = 2048

# Witness catalog
DEFAULT_CHOI_MU_GRID = (1.0, 2.0, 5.0)
FALSIFIER_BATCH = 512

# CLI exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3

# JSON output
JSON_INDENT = None
