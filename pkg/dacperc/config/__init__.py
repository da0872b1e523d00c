import os
import dotenv
dotenv.load_dotenv()

from .config import LOG_DIR, RUN_LOG_DIR, DEFAULT_OUTPUT_DIR, DEFAULT_THREADS
if os.getenv('ENV_STATUS', 'production') == 'development':
    os.makedirs(LOG_DIR, exist_ok=True)
    os.makedirs(RUN_LOG_DIR, exist_ok=True)

from .config import (
    DEFAULT_BURN_IN,
    DEFAULT_THIN,
    DEFAULT_CHAINS,
    DEFAULT_SAMPLES,
    MIN_BUFFER,
    GUARD_SPAN_FRACTION,
    ORACLE_EDGE_CAP,
    ORACLE_JOINT_CELL_CAP,
    ORACLE_LABEL_CELL_CAP,
    PACKING_EXACT_CAP,
    TAIL_MIN_COUNT,
    BOOTSTRAP_RESAMPLES,
    CONFIDENCE_ALPHA,
    RUSSO_DR,
    RUSSO_TOLERANCE,
    LEMMA_TOLERANCE,
    LEMMA_MAX_INSTANCES,
    LEMMA_P_GRID,
    LEMMA_R_GRID,
    LEMMA_GRAPHS,
    NUMBER_FORMAT,
)
from .run_config import RunConfig, build_run_config, load_config_file, psi_hat_from_summary
