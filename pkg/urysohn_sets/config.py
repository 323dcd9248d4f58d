from pathlib import Path

# Directories
ROOT_DIR           = Path(__file__).resolve().parent.parent
FIXTURES_DIR       = ROOT_DIR / 'Fixtures'
RESULTS_DIR        = ROOT_DIR / 'Results'
CATALOG_FILE       = FIXTURES_DIR / 'catalog.csv'
BATCH_INPUT_FILE   = FIXTURES_DIR / 'batch_setexprs.csv'

# Reproducibility
DEFAULT_SEED = 1
DEFAULT_WORKERS = 1

# Brute-force caps
ISOMETRY_CAP = 8           # |A| for find_isometry
AMALGAM_ENUM_CAP = 6       # new pairs for enumerate_amalgams
AGES_SIZE_CAP = 5
AGES_CLASS_CAP = 20000     # candidate tables per size in ages_equal

# Interval decision
CELL_CAP = 250_000
CELL_GRID_DENOMINATOR = 12
CELL_GRID_BRANCH = 16

# Falsifier
FALSIFY_SAMPLES = 100_000
FALSIFY_DENOMINATOR = 8
FALSIFY_CAP = 16
FALSIFY_BATCH = 50_000

# Distance-set enumeration
DENSE_BUDGET = 64
SUMCLOSURE_SCAN = 4096     # bounded enumeration for unbounded sum closures
SWAP_ROUNDS = 2            # swap-witness closure rounds for dense prefixes

# Fraisse builder
BUILD_DOMAIN_CAP = 3
BUILD_VALUE_BUDGET = 6     # dense prefix size for infinite R
SATURATE_BUDGET = 20_000   # stages

# Approximation
COMPLETION_BUDGET = 20_000
COMPLETION_DENOMINATOR = 24
