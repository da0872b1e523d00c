import os
import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

from dacperc.core.helpers import dumps_json, fmt, sha256_file

MANIFEST_NAME = "manifest.json"


class OutputManager:
    """Writes the files of one run and, last, a manifest with their sha256 hashes."""

    def __init__(self, output_dir: str, stem: str):
        self.output_dir = output_dir
        self.stem = stem
        self.files: List[str] = []
        os.makedirs(output_dir, exist_ok=True)

    def path_for(self, suffix: str) -> str:
        return os.path.join(self.output_dir, f"{self.stem}_{suffix}")

    def _write_atomic(self, name: str, text: str) -> str:
        path = self.path_for(name)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
        self.files.append(os.path.basename(path))
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
        return self._write_atomic(name, "\n".join(lines) + "\n")

    def write_json(self, name: str, obj: Any) -> str:
        return self._write_atomic(name, dumps_json(obj) + "\n")

    def write_text(self, name: str, text: str) -> str:
        return self._write_atomic(name, text)

    def finalize(self) -> str:
        """Write the manifest; only files that exist on disk are listed."""
        entries: Dict[str, str] = {}
        for name in self.files:
            path = os.path.join(self.output_dir, name)
            if os.path.exists(path):
                entries[name] = sha256_file(path)
        manifest_path = self.path_for(MANIFEST_NAME)
        tmp = manifest_path + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps({"files": entries}, indent=2, sort_keys=True) + "\n")
        os.replace(tmp, manifest_path)
        return manifest_path


def verify_manifest(manifest_path: str) -> Dict[str, bool]:
    """Re-hash every listed file; maps file name to whether its hash still matches."""
    with open(manifest_path, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    base = os.path.dirname(manifest_path)
    result: Dict[str, bool] = {}
    for name, digest in manifest.get("files", {}).items():
        path = os.path.join(base, name)
        result[name] = os.path.exists(path) and sha256_file(path) == digest
    return result
