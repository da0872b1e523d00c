from typing import Any, Dict, Iterable, Optional, Sequence

from dacperc.config import RunConfig
from dacperc.core.helpers import build_version
from dacperc.core.managers.output_manager import OutputManager


def open_outputs(config: RunConfig) -> OutputManager:
    """Files of a run are named {command-slug}_{fingerprint}_{kind}."""
    slug = config.command.replace(" ", "-")
    return OutputManager(config.output_dir, f"{slug}_{config.fingerprint()}")


def write_summary(out: OutputManager, config: RunConfig, estimates: Dict[str, Any],
                  extra: Optional[Dict[str, Any]] = None) -> str:
    summary = {
        "command": config.command,
        "config": config.echo(),
        "seed": config.seed,
        "fingerprint": config.fingerprint(),
        "build": build_version(),
        "estimates": estimates,
    }
    if extra:
        summary.update(extra)
    return out.write_json("summary.json", summary)


def write_plot(out: OutputManager, rows: Iterable[Sequence[Any]], name: str = "plot.csv") -> str:
    return out.write_csv(name, ["x", "y", "yerr"], rows)
