"""CSV traces and JSON run summaries."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .engine import EVENT_COLUMNS, Trace
from .metrics import Verdict

SUMMARY_KEYS = (
    "scenario", "digest", "seed", "n", "normal", "attacked",
    "verdict", "event_counts", "wall_time",
)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_trace(trace: Trace, out_dir: str | Path) -> tuple[Path, Path]:
    """Write ``trace.csv`` (event rows) and ``dense.csv`` (sampled rows)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    events_path = out / "trace.csv"
    dense_path = out / "dense.csv"
    with events_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_COLUMNS)
        for row in trace.events:
            w.writerow([_fmt(v) for v in row])
    n = trace.n
    with dense_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"x_{i}" for i in range(n)] + [f"u_{i}" for i in range(n)])
        for t, xs, us in zip(trace.dense_t, trace.dense_x, trace.dense_u):
            w.writerow([_fmt(t)] + [_fmt(v) for v in xs] + [_fmt(v) for v in us])
    return events_path, dense_path


def read_events(path: str | Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass
class Summary:
    scenario: str
    digest: str
    seed: int
    n: int
    normal: list[int]
    attacked: list[int]
    verdict: Verdict
    event_counts: list[int]
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Summary":
        d = dict(d)
        d["verdict"] = Verdict.from_dict(d["verdict"])
        return cls(**d)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Summary":
        return cls.from_dict(json.loads(text))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())


def aggregate(summaries: list[Summary]) -> dict:
    """Pass counts and quantiles over a batch of runs."""
    verdicts = [s.verdict for s in summaries]
    diam = np.array([v.diameter_final for v in verdicts])
    t_conv = np.array([v.T_conv for v in verdicts if v.T_conv is not None])
    applicable = [v for v in verdicts if v.lemma3_ok != "not_applicable"]

    def quantiles(a):
        if len(a) == 0:
            return None
        return {"min": float(a.min()), "median": float(np.median(a)), "max": float(a.max())}

    return {
        "runs": len(summaries),
        "seeds": [s.seed for s in summaries],
        "hull_ok": sum(v.hull_ok for v in verdicts),
        "monotone_ok": sum(v.monotone_ok for v in verdicts),
        "zeno_ok": sum(v.zeno_ok for v in verdicts),
        "converged": sum(v.T_conv is not None for v in verdicts),
        "below_threshold": sum(v.diameter_final < v.threshold for v in verdicts),
        "passed": sum(v.passed for v in verdicts),
        "lemma3_ok": sum(v.lemma3_ok is True for v in applicable),
        "lemma3_applicable": len(applicable),
        "diameter_final": quantiles(diam),
        "T_conv": quantiles(t_conv),
    }
