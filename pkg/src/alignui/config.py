"""Service configuration: alignui.toml parsing and defaults."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8400
    dataset_path: Optional[str] = None  # None -> bundled full fixture
    selections_path: str = "selections.jsonl"
    n_runs: int = 10
    cors: list[str] = field(default_factory=lambda: ["*"])
    offline: bool = False
    subsample_seed: int = 7
    assignment_salt: str = "alignui"
    studio_dist: Optional[str] = None
    gateway: dict = field(default_factory=lambda: {"provider": "mock"})

    def __post_init__(self):
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")


def load_config(path) -> ServiceConfig:
    """Read an alignui.toml file ([service] and [gateway] groups)."""
    with open(path, "rb") as handle:
        doc = tomllib.load(handle)
    service = doc.get("service", {})
    config = ServiceConfig(
        host=service.get("host", "127.0.0.1"),
        port=service.get("port", 8400),
        dataset_path=service.get("dataset"),
        selections_path=service.get("selections", "selections.jsonl"),
        n_runs=service.get("n_runs", 10),
        cors=list(service.get("cors", ["*"])),
        offline=service.get("offline", False),
        subsample_seed=service.get("subsample_seed", 7),
        assignment_salt=service.get("assignment_salt", "alignui"),
        studio_dist=service.get("studio_dist"),
        gateway=dict(doc.get("gateway", {"provider": "mock"})),
    )
    return config
