"""
Packaged defaults.  Override any of these with a JSON file, either via the LGWITNESS_SETTINGS environment variable
or `manage.py --config`.
"""

# Beam
W0 = 1.0  # Beam waist; fields are evaluated with r in the same units.

# Radial Gauss-Legendre / azimuthal trapezoid quadrature for mode overlaps
QUADRATURE_R_CUT = 8.0  # Radial cutoff in units of w0
QUADRATURE_RADIAL_NODES = 256
QUADRATURE_AZIMUTHAL_NODES = 64
QUADRATURE_TOL = 1e-6

# State validation
STATE_TOL = 1e-9
ZERO_WEIGHT_TOL = 1e-14  # Subspace weights at or below this count as empty.
SMALL_D_CAP = 8  # Largest D held as a full D^2 x D^2 density matrix.

# Oracle
ORACLE_RANK_TOL = 1e-10  # Relative singular value cutoff
ORACLE_TOL = 1e-9
ORACLE_SEARCH_ITERS = 10000

# Witness
EXHAUSTIVE_SUBSET_CAP = 12
N_RESAMPLES = 200

# Simulation
FLUX = 1e6

# Robustness study
ROBUSTNESS_TRIALS = 1000
ROBUSTNESS_STRENGTH_MAX = 0.2

# Logging
LOG_LEVEL = "INFO"
LOG_FILE = None  # Path of a JSON-lines run log; None disables it.

# Sentry (getsentry.com) info
SENTRY_DSN = ""

TESTING = False
