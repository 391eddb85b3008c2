"""Configuration settings for the modular-network simulator."""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Register limits
MAX_QUBITS = int(os.getenv('MODNET_MAX_QUBITS', '16'))
DEFAULT_MAX_ROUNDS = int(os.getenv('MODNET_MAX_ROUNDS', '64'))

# Output locations
LOG_DIR = os.getenv('MODNET_LOG_DIR', 'logs')
ERROR_LOG_DIR = os.getenv('MODNET_ERROR_LOG_DIR', '')  # empty = memory only
LOG_LEVEL = os.getenv('MODNET_LOG_LEVEL', 'WARNING')  # lowest level echoed to stderr

# Numerical tolerances
NORM_TOL = 1e-9
UNITARY_TOL = 1e-9
PROB_ZERO_TOL = 1e-12
EIGEN_CUTOFF = 1e-12
ANGLE_TOL = 1e-9
FIDELITY_TOL = 1e-9
CODE_SPACE_TOL = 1e-9
COST_TAIL_TOL = 1e-12
THRESHOLD_XTOL = 1e-6

# Physical defaults (dimensionless units)
DEFAULT_J = 1.0
DEFAULT_GAMMA = 2.0

# Scenario / report format
SCHEMA_VERSION = 1
DEFAULT_TRIALS = 1000

VERSION = '0.1.0'
VERIFY_SEED = int(os.getenv('MODNET_VERIFY_SEED', '20240601'))
