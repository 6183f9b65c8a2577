"""Process-wide settings: magnitude budget and stratum cache location."""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import StratumBudgetError

DEFAULT_N_MAX = 16


def _default_cache_dir() -> Path:
    env = os.environ.get("NCNAT_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "ncnat"


def _default_n_max() -> int:
    env = os.environ.get("NCNAT_N_MAX")
    return int(env) if env else DEFAULT_N_MAX


@dataclass(frozen=True)
class Config:
    n_max: int = DEFAULT_N_MAX
    cache_dir: Path | None = None
    use_disk_cache: bool = True
    output: str = "text"

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.output not in ("text", "json"):
            raise ValueError(f"unknown output mode {self.output!r}")


_lock = threading.Lock()
_config = Config(n_max=_default_n_max(), cache_dir=_default_cache_dir())


def get_config() -> Config:
    return _config


def configure(**changes) -> Config:
    """Replace fields of the active config and return the new one.

    Strata already closed in this process stay cached; only the budget
    check and cache directory used for new closures change.
    """
    global _config
    with _lock:
        if "cache_dir" in changes and changes["cache_dir"] is not None:
            changes["cache_dir"] = Path(changes["cache_dir"])
        _config = replace(_config, **changes)
        return _config


def check_budget(n: int) -> None:
    if n < 1:
        raise ValueError(f"magnitude must be positive, got {n}")
    limit = _config.n_max
    if n > limit:
        raise StratumBudgetError(n, limit)
