import os
import json
import uuid
from datetime import datetime
from typing import Any, Dict, Optional

from dacperc.config import RUN_LOG_DIR


class RunLogger:
    """Append-only JSONL log of one run. Writes nothing unless ENV_STATUS=development."""

    def __init__(self, command: str, fingerprint: str = "", run_id: Optional[str] = None, log_dir: str = RUN_LOG_DIR):
        self.command = command
        self.fingerprint = fingerprint
        self.run_id = run_id or f"{command.replace(' ', '-')}_{datetime.now().strftime('%Y%m%d_%H%M%S')}_{uuid.uuid4().hex[:8]}"
        self.log_dir = log_dir
        self.log_file = os.path.join(log_dir, f"{self.run_id}.jsonl")
        self.event_count = 0

    @staticmethod
    def enabled() -> bool:
        return os.getenv('ENV_STATUS', 'production') == 'development'

    def _init_log_file(self):
        """Initialize the log file with metadata."""
        os.makedirs(self.log_dir, exist_ok=True)
        if not os.path.exists(self.log_file):
            with open(self.log_file, "w", encoding="utf-8") as f:
                metadata = {
                    "type": "metadata",
                    "run_id": self.run_id,
                    "command": self.command,
                    "fingerprint": self.fingerprint,
                    "start_time": datetime.now().isoformat(),
                }
                f.write(json.dumps(metadata) + "\n")

    def log(self, event: str, payload: Optional[Dict[str, Any]] = None, success: bool = True, error: Optional[str] = None):
        # no logs in production
        if not self.enabled():
            return

        self._init_log_file()
        self.event_count += 1
        entry = {
            "type": event,
            "timestamp": datetime.now().isoformat(),
            "event_count": self.event_count,
            "success": success,
        }
        if payload:
            entry["payload"] = payload
        if error:
            entry["error"] = error

        with open(self.log_file, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, ensure_ascii=False, default=str) + "\n")


class NullLogger(RunLogger):
    def __init__(self):
        super().__init__("null", run_id="null")

    def log(self, event: str, payload: Optional[Dict[str, Any]] = None, success: bool = True, error: Optional[str] = None):
        return
