import json
import tomllib
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from dacperc.config.config import (
    DEFAULT_BURN_IN,
    DEFAULT_CHAINS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SAMPLES,
    DEFAULT_THIN,
    RUSSO_DR,
)
from dacperc.core.errors import ConfigError
from dacperc.core.helpers import fingerprint


class RunConfig(BaseModel):
    """Everything that determines the outputs of one CLI run (threads excluded)."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    command: str
    beta: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    p: Optional[float] = Field(default=None, ge=0.0, lt=1.0)
    q: float = Field(default=2.0, ge=1.0)
    r: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    r_grid: List[float] = Field(default_factory=list)
    p_grid: List[float] = Field(default_factory=list)
    radius_grid: List[int] = Field(default_factory=list)
    n: Optional[int] = Field(default=None, ge=1)
    n_list: List[int] = Field(default_factory=list)
    big_n: Optional[int] = Field(default=None, ge=1)
    box: Optional[Tuple[int, int]] = None
    region: Optional[str] = None
    direction: Literal["horizontal", "vertical"] = "horizontal"
    sign: Literal["+", "-"] = "+"
    window: Optional[int] = Field(default=None, ge=1)
    windows: List[int] = Field(default_factory=list)
    buffer: Optional[int] = Field(default=None, ge=0)
    compare_buffer: Optional[int] = Field(default=None, ge=0)
    square: bool = False
    graph: Optional[str] = None
    graphs: List[str] = Field(default_factory=list)
    samples: int = Field(default=DEFAULT_SAMPLES, ge=1)
    count: int = Field(default=1, ge=1)
    burn_in: int = Field(default=DEFAULT_BURN_IN, ge=1)
    thin: int = Field(default=DEFAULT_THIN, ge=1)
    chains: int = Field(default=DEFAULT_CHAINS, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    eps: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    dr: float = Field(default=RUSSO_DR, gt=0.0, lt=0.5)
    psi_hat: Optional[float] = Field(default=None, gt=0.0, allow_inf_nan=False)
    output_dir: str = DEFAULT_OUTPUT_DIR

    @field_validator("r_grid", "p_grid")
    @classmethod
    def _check_unit_grid(cls, values: List[float]) -> List[float]:
        for r in values:
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"grid value {r} outside [0, 1]")
        return sorted(values)

    @field_validator("radius_grid", "n_list", "windows")
    @classmethod
    def _check_positive(cls, values: List[int]) -> List[int]:
        for m in values:
            if m < 1:
                raise ValueError(f"value {m} must be >= 1")
        return sorted(values)

    @field_validator("box")
    @classmethod
    def _check_box(cls, value):
        if value is not None and (value[0] < 0 or value[1] < 0):
            raise ValueError("box dimensions must be nonnegative")
        return value

    def fingerprint(self) -> str:
        return fingerprint(self.model_dump(mode="json", exclude={"output_dir"}))

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _normalise_keys(values: Dict[str, Any]) -> Dict[str, Any]:
    return {str(k).replace("-", "_"): v for k, v in values.items()}


def load_config_file(path: str, command: str) -> Dict[str, Any]:
    """
    Read a TOML run file. Keys in [defaults] apply to every command; a table
    named after the command (e.g. [estimate.crossing]) overrides them.
    """
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    merged = _normalise_keys({k: v for k, v in data.get("defaults", {}).items()})
    section: Any = data
    for part in command.split():
        section = section.get(part, {}) if isinstance(section, dict) else {}
    if isinstance(section, dict):
        merged.update(_normalise_keys({k: v for k, v in section.items() if not isinstance(v, dict)}))
    psi_from = merged.pop("psi_from", None)
    if psi_from is not None and merged.get("psi_hat") is None:
        merged["psi_hat"] = psi_hat_from_summary(str(psi_from))
    return merged


def build_run_config(command: str, file_values: Optional[Dict[str, Any]], flags: Dict[str, Any]) -> RunConfig:
    """Overlay explicit flags on config-file values; flags win."""
    merged: Dict[str, Any] = dict(file_values or {})
    merged.update({k: v for k, v in flags.items() if v is not None and v != ()})
    merged["command"] = command
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(x) for x in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from e


def psi_hat_from_summary(path: str) -> float:
    """The FK-range decay rate recorded by a `fit fk-range` summary.json."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            summary = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read fk-range summary {path}: {e}") from e
    record = summary.get("estimates", {}).get("fk_range") if isinstance(summary, dict) else None
    if not isinstance(record, dict) or "rate" not in record:
        raise ConfigError(f"{path} is not a fit fk-range summary")
    if record.get("degenerate"):
        raise ConfigError(f"{path} holds a degenerate fk-range fit; no psi_hat available")
    rate = float(record["rate"])
    if not rate > 0.0:
        raise ConfigError(f"{path} records a non-positive decay rate {rate}")
    return rate
