__version__ = "0.1.0"

from .config import RunConfig

from .core import Vertex, Parallelogram, Box, FiniteGraph
from .models import DacSample, SpinConfig, color
from .models.rcm import RcmParams, EdgeConfig, ExactModel, sample_fk
from .analysis import CrossingSpec, has_crossing, lowest_crossing
