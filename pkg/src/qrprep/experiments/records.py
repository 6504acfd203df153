"""Run records and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

HEADER = ("experiment", "realization", "gamma_over_p", "objective", "probability",
          "steps", "seed", "wall_time_s")

OK = "ok"
NONCONVERGED = "nonconverged"
POSTSELECTION_FAILED = "postselection_failed"


@dataclass
class RunRecord:
    experiment: str
    realization: int
    gamma_over_p: float
    objective: float
    probability: float
    steps: int
    seed: int
    wall_time_s: float
    status: str = OK
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isnan(self.probability) or -1e-12 <= self.probability <= 1 + 1e-12):
            raise ValueError(f"probability {self.probability} outside [0, 1]")

    def row(self) -> list[str]:
        return [self.experiment, str(self.realization), _num(self.gamma_over_p), _num(self.objective),
                _num(self.probability), str(self.steps), str(self.seed), f"{self.wall_time_s:.6f}"]


def _num(x: float) -> str:
    # repr round-trips a double exactly
    return repr(float(x))


def sort_records(records):
    return sorted(records, key=lambda r: (r.gamma_over_p, r.realization))


def write_records(records, path, format: str = "csv", manifest: dict | None = None) -> Path:
    """Write ``records`` as CSV ordered by (gamma_over_p, realization).

    With ``manifest`` a ``<path>.json`` sidecar holds the spec, per-record
    status and extra metrics. Raises ``OSError`` on I/O failure.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    path = Path(path)
    rows = sort_records(records)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for r in rows:
            w.writerow(r.row())
    if manifest is not None:
        doc = dict(manifest)
        doc["records"] = [{"realization": r.realization, "gamma_over_p": r.gamma_over_p,
                           "status": r.status, **r.extras} for r in rows]
        path.with_name(path.name + ".json").write_text(json.dumps(doc, indent=2, sort_keys=True,
                                                                  default=_jsonable) + "\n")
    return path


def _jsonable(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def read_records(path) -> list[RunRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != HEADER:
            raise ValueError(f"unexpected header {header}")
        return [RunRecord(e, int(k), float(g), float(o), float(p), int(s), int(seed), float(t))
                for e, k, g, o, p, s, seed, t in reader]
