"""Run configuration and run manifests.

Precedence, lowest first: built-in defaults, the key-value config file,
environment variables (``ECPOISSON_CACHE_DIR``, ``ECPOISSON_WORKERS``),
then explicit command-line flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .curves import DEFAULT_TABLE_BUDGET

ENV_CACHE_DIR = "ECPOISSON_CACHE_DIR"
ENV_WORKERS = "ECPOISSON_WORKERS"
FORMATS = ("json", "csv")


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "ecpoisson"


@dataclass
class Config:
    cache_dir: Path = field(default_factory=default_cache_dir)
    workers: int = 1
    prime_bound: int = 10**5
    table_memory_budget: int = DEFAULT_TABLE_BUDGET
    output_format: str = "json"

    def __post_init__(self):
        self.cache_dir = Path(self.cache_dir)
        self.workers = int(self.workers)
        self.prime_bound = int(self.prime_bound)
        self.table_memory_budget = int(self.table_memory_budget)
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["cache_dir"] = str(self.cache_dir)
        return d


def parse_config_file(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def load_config(path: str | os.PathLike | None = None, **flags) -> Config:
    known = {f.name for f in fields(Config)}
    values: dict[str, object] = {}
    if path is not None:
        for key, value in parse_config_file(path).items():
            if key not in known:
                raise ValueError(f"unknown config key: {key}")
            values[key] = value
    if os.environ.get(ENV_CACHE_DIR):
        values["cache_dir"] = os.environ[ENV_CACHE_DIR]
    if os.environ.get(ENV_WORKERS):
        values["workers"] = os.environ[ENV_WORKERS]
    values.update({k: v for k, v in flags.items() if v is not None})
    return Config(**values)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str = __version__
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)

    def write(self, path: str | os.PathLike) -> Path:
        path = Path(path)
        missing = [o for o in self.outputs if not Path(o).exists()]
        if missing:
            raise FileNotFoundError(f"manifest lists missing outputs: {missing}")
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path
