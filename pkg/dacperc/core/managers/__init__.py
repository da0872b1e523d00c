from .stream_manager import StreamManager
from .run_logger import RunLogger, NullLogger
from .output_manager import OutputManager, verify_manifest
