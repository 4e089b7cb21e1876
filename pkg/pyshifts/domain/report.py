"""Verification report entity."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from .verdict import json_ready

SCHEMA_VERSION = 1

STATUSES = ("pass", "fail")


@dataclass(frozen=True)
class Report:
    """Outcome of one CLI command run against one scenario.

    Attributes:
        command: Subcommand that produced the report
        scenario: Scenario name
        scenario_hash: SHA-256 of the scenario's canonical JSON
        seed: Seed of every randomized step
        mode: Scalar mode (``exact`` or ``float``)
        status: ``pass`` or ``fail``
        entries: One JSON-ready row per checked item, in a stable order
        notes: Free-form remarks (fallbacks taken, skipped checks)
    """

    command: str
    scenario: str
    scenario_hash: str
    seed: int
    mode: str
    status: str
    entries: tuple[Mapping[str, Any], ...] = ()
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"Report status must be one of {STATUSES}, got {self.status!r}")
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "notes", tuple(self.notes))

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "scenario": self.scenario,
            "scenario_hash": self.scenario_hash,
            "seed": self.seed,
            "mode": self.mode,
            "status": self.status,
            "entries": json_ready(list(self.entries)),
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> Report:
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"Unsupported report schema version {version!r}")
        return cls(
            command=doc["command"],
            scenario=doc["scenario"],
            scenario_hash=doc["scenario_hash"],
            seed=int(doc["seed"]),
            mode=doc["mode"],
            status=doc["status"],
            entries=tuple(doc.get("entries", [])),
            notes=tuple(doc.get("notes", [])),
        )
