import hashlib
import json
import math
import subprocess
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from dacperc.config.config import NUMBER_FORMAT


def fmt(x: Any) -> str:
    """Render a number for CSV output with 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), NUMBER_FORMAT)


def rle_bits(bits: Iterable[int]) -> str:
    """Run-length encode a 0/1 sequence as e.g. "12c1o4c" (o = open, c = closed)."""
    out = []
    run_value, run_length = None, 0
    for b in bits:
        b = 1 if b else 0
        if b == run_value:
            run_length += 1
            continue
        if run_value is not None:
            out.append(f"{run_length}{'o' if run_value else 'c'}")
        run_value, run_length = b, 1
    if run_value is not None:
        out.append(f"{run_length}{'o' if run_value else 'c'}")
    return "".join(out)


def unrle_bits(text: str) -> np.ndarray:
    values = []
    number = ""
    for ch in text:
        if ch.isdigit():
            number += ch
        else:
            values.extend([1 if ch == "o" else 0] * int(number))
            number = ""
    return np.array(values, dtype=np.uint8)


def _json_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return fmt(x)


def dumps_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """json.dumps with sorted keys, floats written as .17g and numpy scalars unwrapped."""
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    elif isinstance(obj, np.floating):
        obj = float(obj)
    elif isinstance(obj, np.generic):
        obj = obj.item()
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _json_float(obj)
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {dumps_json(obj[k], indent, _level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{dumps_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def fingerprint(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()[:12]


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_version() -> str:
    """git describe of the source tree when available, otherwise the installed package version."""
    repo_root = Path(__file__).resolve().parents[2]
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=repo_root, capture_output=True, text=True, check=True, timeout=5,
        )
        described = result.stdout.strip()
        if described:
            return described
    except (OSError, subprocess.SubprocessError):
        pass
    try:
        return metadata.version("dacperc")
    except metadata.PackageNotFoundError:
        from dacperc import __version__
        return __version__
