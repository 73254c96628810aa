"""Per-iteration trace records and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ecfp.errors import InvalidArgumentError

COLUMNS = ("t", "gamma", "epsilon", "ne_gap", "mce_gap", "sne_gap", "lyapunov_w", "lyapunov_v")


@dataclass(frozen=True)
class TraceRecord:
    t: int
    gamma: float
    epsilon: float
    ne_gap: float
    mce_gap: float
    sne_gap: float
    lyapunov_w: float
    lyapunov_v: float


@dataclass
class Trace:
    """Recorded rows of one run.

    ``error`` is set when the run aborted; the rows recorded before the abort
    are kept. ``max_lyapunov_drop`` is the largest one-step decrease of
    U(qbar) seen by the process loop (``None`` when not tracked).
    """

    records: list = field(default_factory=list)
    error: str | None = None
    max_lyapunov_drop: float | None = None
    max_centroid_drift: float = 0.0

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]


def _fmt(x) -> str:
    if isinstance(x, int):
        return str(x)
    return format(x, ".17g")


def emit_trace(trace: Trace, path, fmt: str = "csv") -> None:
    """Write the records of ``trace`` to ``path``.

    CSV floats carry 17 significant digits, so re-reading recovers every bit.
    When the run aborted, the error text goes to ``<path>.error``.
    """
    path = Path(path)
    rows = trace.records
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write(",".join(COLUMNS) + "\n")
            for r in rows:
                fh.write(",".join(_fmt(getattr(r, c)) for c in COLUMNS) + "\n")
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump([asdict(r) for r in rows], fh, indent=1)
            fh.write("\n")
    else:
        raise InvalidArgumentError(f"unknown trace format {fmt!r}; use 'csv' or 'json'")
    err_path = path.with_name(path.name + ".error")
    if trace.error is not None:
        err_path.write_text(trace.error + "\n")
    elif err_path.exists():
        err_path.unlink()


def read_trace(path, fmt: str | None = None) -> Trace:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    types = {f.name: (int if f.name == "t" else float) for f in fields(TraceRecord)}
    if fmt == "json":
        raw = json.loads(path.read_text())
    else:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != COLUMNS:
                raise InvalidArgumentError(f"{path}: unexpected CSV header {reader.fieldnames}")
            raw = list(reader)
    records = [TraceRecord(**{k: types[k](v) for k, v in row.items()}) for row in raw]
    err_path = path.with_name(path.name + ".error")
    error = err_path.read_text().strip() if err_path.exists() else None
    return Trace(records=records, error=error)
