import os
import dotenv
dotenv.load_dotenv()


LOG_DIR = os.getenv(
    "DACPERC_LOG_DIR",
    os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "logs")),
)
RUN_LOG_DIR = os.path.join(LOG_DIR, "runs")
DEFAULT_OUTPUT_DIR = os.getenv("DACPERC_OUTPUT_DIR", os.path.abspath("dacperc_output"))
DEFAULT_THREADS = int(os.getenv("DACPERC_THREADS", "0")) or (os.cpu_count() or 1)


# Swendsen-Wang chain defaults
DEFAULT_BURN_IN = 200
DEFAULT_THIN = 10
DEFAULT_CHAINS = 8
DEFAULT_SAMPLES = 2000

# Finite-volume protocol
MIN_BUFFER = 16
GUARD_SPAN_FRACTION = 0.01

# Exact oracle limits
ORACLE_EDGE_CAP = 24
ORACLE_JOINT_CELL_CAP = 2 ** 22
ORACLE_LABEL_CELL_CAP = 2 ** 26
PACKING_EXACT_CAP = 20

# Estimators
TAIL_MIN_COUNT = 30
BOOTSTRAP_RESAMPLES = 200
CONFIDENCE_ALPHA = 0.05
RUSSO_DR = 1e-4
RUSSO_TOLERANCE = 1e-6
LEMMA_TOLERANCE = 1e-10
LEMMA_MAX_INSTANCES = 400

LEMMA_P_GRID = (0.2, 0.5, 0.8)
LEMMA_R_GRID = (0.3, 0.5, 0.7)
LEMMA_GRAPHS = ("triangle", "S1,1", "S2,1")

NUMBER_FORMAT = ".17g"
