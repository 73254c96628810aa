"""Convergence summaries of recorded traces."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ecfp.errors import InvalidArgumentError
from ecfp.trace import Trace

DEFAULT_THRESHOLDS = {"ne_gap": 0.05, "mce_gap": 0.05, "sne_gap": 0.05}


@dataclass
class ConvergenceReport:
    final_t: int
    final_ne_gap: float
    final_mce_gap: float
    final_sne_gap: float
    min_ne_gap: float
    min_mce_gap: float
    min_sne_gap: float
    thresholds: dict = field(default_factory=dict)
    # per gap: did the running minimum fall to or below its threshold
    below: dict = field(default_factory=dict)
    # per gap: first recorded t at or below the threshold (None if never)
    first_crossing: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def converged(self) -> bool:
        """MCE and SNE gaps both reached their thresholds."""
        return self.below.get("mce_gap", False) and self.below.get("sne_gap", False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["converged"] = self.converged
        return out


def summarize(trace: Trace, thresholds: dict | None = None) -> ConvergenceReport:
    if not trace.records:
        raise InvalidArgumentError("cannot summarize an empty trace")
    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    recs = trace.records
    last = recs[-1]
    below, first = {}, {}
    for name in ("ne_gap", "mce_gap", "sne_gap"):
        first[name] = next((r.t for r in recs if getattr(r, name) <= th[name]), None)
        below[name] = first[name] is not None
    return ConvergenceReport(
        final_t=last.t,
        final_ne_gap=last.ne_gap,
        final_mce_gap=last.mce_gap,
        final_sne_gap=last.sne_gap,
        min_ne_gap=min(r.ne_gap for r in recs),
        min_mce_gap=min(r.mce_gap for r in recs),
        min_sne_gap=min(r.sne_gap for r in recs),
        thresholds=th,
        below=below,
        first_crossing=first,
        error=trace.error,
    )
