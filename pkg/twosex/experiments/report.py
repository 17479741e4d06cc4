from __future__ import annotations
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from pathlib import Path
import json
import math
import numpy as np
import pandas as pd


@dataclass(frozen=True)
class Thresholds:
    """Pass/fail thresholds of the statistical assertions."""

    sigma: float = 3.0
    lln_sigma: float = 2.0
    profile_median_distance: float = 0.05
    profile_ratio_tolerance: float = 0.05
    corridor_fraction: float = 0.95
    sweep_subcritical_q: float = 0.99
    sweep_supercritical_q: float = 0.9
    sweep_subcritical_margin: float = 0.1
    sweep_supercritical_margin: float = 0.2
    c_floor: float = 1e-3
    supermartingale_atol: float = 1e-9

    @classmethod
    def from_dict(cls, values: dict | None) -> Thresholds:
        known = {f.name for f in fields(cls)}
        unknown = set(values or {}) - known
        if unknown:
            raise ValueError(f"Unknown thresholds: {', '.join(sorted(unknown))}")
        return cls(**(values or {}))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    """Cells of one experiment run; each statistic carries its sample size and standard error."""

    name: str
    fingerprint: str
    parameters: dict
    seed: int
    cells: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, **cell) -> dict:
        self.cells.append(cell)
        return cell

    def note(self, message: str):
        self.notes.append(message)

    @property
    def passed(self) -> bool:
        """True unless some asserted cell failed; unasserted cells carry passed=None."""
        return all(cell.get("passed") is not False for cell in self.cells)

    @property
    def failures(self) -> list[dict]:
        return [cell for cell in self.cells if cell.get("passed") is False]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records([to_plain(cell) for cell in self.cells])

    def summary(self) -> dict:
        return {
            "experiment": self.name,
            "fingerprint": self.fingerprint,
            "parameters": to_plain(self.parameters),
            "seed": self.seed,
            "passed": self.passed,
            "cells": len(self.cells),
            "failures": len(self.failures),
            "notes": list(self.notes),
        }

    def write_csv(self, path: str | Path):
        self.to_frame().to_csv(path, index=False, lineterminator="\n")

    def write_json(self, path: str | Path, extra: dict | None = None):
        document = {**self.summary(), "results": [to_plain(cell) for cell in self.cells], **(extra or {})}
        Path(path).write_text(json.dumps(document, sort_keys=True, indent=2) + "\n")


def mean_and_stderr(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("nan"), float("nan")
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def to_plain(value: any) -> any:
    """JSON-ready copy: arrays to lists, enums to values, non-finite floats to strings."""
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.generic):
        return to_plain(value.item())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(key): to_plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(item) for item in value]
    return value
