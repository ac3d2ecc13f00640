"""Verdicts computed from finished traces.

All checks are pure functions of a :class:`~rcsim.engine.Trace` and the
set of normal nodes, which only the evaluator knows.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .adversary import ACQUISITION, TIMING

SLACK = 1e-9
ZENO_SLACK = 1e-12
NOT_APPLICABLE = "not_applicable"


@dataclass
class Verdict:
    hull_ok: bool
    hull_violation: list | None
    monotone_ok: bool
    diameter_final: float
    T_conv: float | None
    zeno_ok: bool
    settle_witnesses: list | None
    lemma3_ok: bool | str
    threshold: float

    @property
    def passed(self) -> bool:
        """Hull containment plus the finite-horizon agreement bound."""
        return self.hull_ok and self.T_conv is not None and self.diameter_final < self.threshold

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(**d)


def _normal_cols(trace, normal: Iterable[int] | None) -> list[int]:
    if normal is None:
        normal = trace.scenario.normal
    return sorted(normal)


def hull_check(trace, normal=None, tol: float = SLACK):
    """Normal states stay within the range of the normal initial values.

    Returns ``(ok, witness)``; the witness is ``[t, node, value]`` for the
    first offending row.
    """
    cols = _normal_cols(trace, normal)
    x0 = np.asarray(trace.scenario.x0)[cols]
    lo, hi = x0.min() - tol, x0.max() + tol
    t, x = trace.rows()
    sub = x[:, cols]
    bad = (sub < lo) | (sub > hi)
    if not bad.any():
        return True, None
    row, k = np.argwhere(bad)[0]
    return False, [float(t[row]), int(cols[k]), float(sub[row, k])]


def monotonicity_check(trace, normal=None, tol: float = SLACK) -> bool:
    cols = _normal_cols(trace, normal)
    _, x = trace.rows()
    if len(x) < 2:
        return True
    sub = x[:, cols]
    x_min = sub.min(axis=1)
    x_max = sub.max(axis=1)
    return bool(np.all(np.diff(x_min) >= -tol) and np.all(np.diff(x_max) <= tol))


def diameters(trace, normal=None) -> tuple[np.ndarray, np.ndarray]:
    cols = _normal_cols(trace, normal)
    t, x = trace.rows()
    sub = x[:, cols]
    return t, sub.max(axis=1) - sub.min(axis=1)


def convergence(trace, normal=None, threshold: float | None = None) -> tuple[float, float | None]:
    """Final normal diameter and the earliest row time after which it stays below ``threshold``."""
    if threshold is None:
        threshold = 3 * trace.scenario.params.epsilon
    t, diam = diameters(trace, normal)
    final = float(diam[-1])
    above = np.flatnonzero(diam >= threshold)
    if len(above) == 0:
        return final, float(t[0])
    last = above[-1]
    if last == len(t) - 1:
        return final, None
    return final, float(t[last + 1])


def zeno_check(trace, delta_min=None, tol: float = ZENO_SLACK) -> bool:
    if delta_min is None:
        delta_min = trace.scenario.params.delta_min
    last: dict[int, float] = {}
    for e in trace.events:
        t, i = e[0], e[1]
        if i in last and t - last[i] < delta_min[i] - tol:
            return False
        last[i] = t
    return True


def _tail_mask(t: np.ndarray, fraction: float) -> np.ndarray:
    t_end = t[-1]
    return t >= t_end - fraction * (t_end - t[0])


def settle_check(trace, normal=None, tol: float = SLACK, tail: float = 0.2):
    """Normal nodes pinned at the final minimum and maximum over the last part of the run.

    Returns ``[r, s]`` or ``None`` when the horizon is too short to show them.
    """
    cols = _normal_cols(trace, normal)
    t, x = trace.rows()
    mask = _tail_mask(t, tail)
    end = x[-1]
    x_lo = min(end[c] for c in cols)
    x_hi = max(end[c] for c in cols)
    flat = [c for c in cols if np.all(np.abs(x[mask, c] - end[c]) <= tol)]
    low = [c for c in flat if abs(end[c] - x_lo) <= tol]
    high = [c for c in flat if abs(end[c] - x_hi) <= tol]
    if not low or not high:
        return None
    return [low[0], high[0]]


def settle_time(trace, node: int, tol: float = SLACK) -> float:
    """Earliest row time from which ``node`` stays at its final value."""
    t, x = trace.rows()
    moved = np.flatnonzero(np.abs(x[:, node] - x[-1, node]) > tol)
    if len(moved) == 0:
        return float(t[0])
    if moved[-1] == len(t) - 1:
        return float(t[-1])
    return float(t[moved[-1] + 1])


def lemma3_applicable(trace) -> bool:
    return all(s.kind in (ACQUISITION, TIMING) for s in trace.scenario.attacks)


def lemma3_check(trace, normal=None, eps: float | None = None, tol: float = SLACK):
    """Bounded filtered averages at the settled extreme nodes.

    Only meaningful when every attack is on acquisition or timing. Events
    of the two witnesses are checked once both have settled, the diameter
    bound holds, and a further ``eps/4`` has elapsed.
    """
    if not lemma3_applicable(trace):
        return NOT_APPLICABLE
    if eps is None:
        eps = trace.scenario.params.epsilon
    witnesses = settle_check(trace, normal)
    if witnesses is None:
        return False
    _, t_conv = convergence(trace, normal, 3 * eps)
    if t_conv is None:
        return False
    start = max(t_conv, *(settle_time(trace, w) for w in witnesses)) + eps / 4
    for e in trace.events:
        if e[1] in witnesses and e[0] >= start and not abs(e[5]) < 1.5 * eps + tol:
            return False
    return True


def evaluate(trace, normal=None, threshold: float | None = None) -> Verdict:
    eps = trace.scenario.params.epsilon
    if threshold is None:
        threshold = 3 * eps
    hull_ok, witness = hull_check(trace, normal)
    diam, t_conv = convergence(trace, normal, threshold)
    return Verdict(
        hull_ok=hull_ok,
        hull_violation=witness,
        monotone_ok=monotonicity_check(trace, normal),
        diameter_final=diam,
        T_conv=t_conv,
        zeno_ok=zeno_check(trace),
        settle_witnesses=settle_check(trace, normal),
        lemma3_ok=lemma3_check(trace, normal, eps),
        threshold=threshold,
    )
