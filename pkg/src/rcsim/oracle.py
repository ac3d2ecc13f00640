"""Fixed-step forward-Euler reference integrator.

Deliberately simple and slow: states are accumulated step by step on a
grid of spacing at most ``h`` and each node's next poll is found by a
linear scan rather than a priority queue. With ``alignment`` on, every
scheduled poll instant and every output instant is inserted into the grid
so controls switch exactly where they should. Rounds reuse the protocol
functions, which is what the engine is cross-checked against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .adversary import ACQUISITION, CONTROL, NEVER, TIMING, TRANSMISSION, emit, perceive, timing_override
from .engine import ACTIVATION, UPDATE, Trace, output_grid
from .protocol import NeighborSample, normal_round
from .scenario import Scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleConfig:
    h: float
    alignment: bool = True

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")

    @classmethod
    def for_scenario(cls, scenario: Scenario, alignment: bool = True) -> "OracleConfig":
        return cls(min(scenario.params.delta_min) / 10, alignment)


def run_fixed_step(scenario: Scenario, config: OracleConfig) -> Trace:
    sc = scenario.validate()
    if config.h > min(sc.params.delta_min) / 10:
        logger.info("oracle step %g is coarser than min(delta_min)/10", config.h)
    n = sc.n
    params = sc.params
    nbrs = [sorted(a) for a in sc.graph.adjacency]
    deg = sc.graph.degrees
    t0 = sc.t0
    per_node = {}
    for s in sc.attacks:
        per_node.setdefault(s.node, {})[s.kind] = s
    kinds = [per_node.get(i, {}) for i in range(n)]
    acq_rng = [rng.stream(sc.seed, i, "acquisition") if ACQUISITION in kinds[i] else None for i in range(n)]
    tx_rng = [rng.stream(sc.seed, i, "transmission") if TRANSMISSION in kinds[i] else None for i in range(n)]

    x = list(sc.x0)
    u = [0.0] * n
    next_poll = list(t0)
    first = [True] * n
    h = config.h
    out_times = output_grid(sc.t_end, sc.output_dt)
    out_k = 0

    events, event_states = [], []
    dense_t, dense_x, dense_u = [], [], []

    def control_at(i, t):
        spec = kinds[i].get(CONTROL)
        if spec is not None:
            return spec.model.evaluate(t) if t >= t0[i] else 0.0
        return u[i]

    t = 0.0
    step_k = 0
    while True:
        # process every poll due at the current grid time, ascending id
        due = [i for i in range(n) if next_poll[i] <= t] if config.alignment else \
              [i for i in range(n) if next_poll[i] <= t + 1e-15]
        tx_now = {}
        for i in due:
            z_all = {}
            for j in nbrs[i]:
                if t >= t0[j]:
                    if j not in tx_now:
                        tx_now[j] = emit(kinds[j].get(TRANSMISSION), x[j], tx_rng[j])
                    z_all[j] = tx_now[j]
            samples = [
                NeighborSample(j, perceive(kinds[i].get(ACQUISITION), z, acq_rng[i]), True)
                for j, z in z_all.items()
            ]
            d = normal_round(x[i], samples, params, deg[i], i)
            delta = d.delta
            if TIMING in kinds[i]:
                delta = timing_override(kinds[i][TIMING], params.delta_min[i])
            if CONTROL not in kinds[i]:
                u[i] = float(d.control)
            kind = ACTIVATION if first[i] else UPDATE
            first[i] = False
            events.append((t, i, kind, x[i], control_at(i, t), d.ave, len(d.accepted), delta))
            event_states.append(tuple(x))
            next_poll[i] = t + delta if delta != NEVER else NEVER

        while out_k < len(out_times) and out_times[out_k] <= t:
            if out_times[out_k] == t or not config.alignment:
                dense_t.append(out_times[out_k])
                dense_x.append(tuple(x))
                dense_u.append(tuple(control_at(i, t) for i in range(n)))
            out_k += 1

        if t >= sc.t_end:
            break
        # next grid point: base step, capped by the next poll and output instant
        base = (step_k + 1) * h
        while base <= t:
            step_k += 1
            base = (step_k + 1) * h
        t_next = min(base, sc.t_end)
        if config.alignment:
            pending = min(next_poll)
            if pending < t_next:
                t_next = pending
            if out_k < len(out_times) and out_times[out_k] < t_next:
                t_next = out_times[out_k]
        dt = t_next - t
        for i in range(n):
            x[i] += control_at(i, t) * dt
        t = t_next

    return Trace(
        sc,
        events,
        np.array(event_states, dtype=float).reshape(-1, n),
        np.array(dense_t, dtype=float),
        np.array(dense_x, dtype=float).reshape(-1, n),
        np.array(dense_u, dtype=float).reshape(-1, n),
    )


def max_state_deviation(a: Trace, b: Trace, nodes=None) -> float:
    """Largest state gap between two traces over their shared dense instants."""
    common, ia, ib = np.intersect1d(a.dense_t, b.dense_t, return_indices=True)
    if len(common) == 0:
        return math.inf
    cols = sorted(nodes) if nodes is not None else slice(None)
    return float(np.max(np.abs(a.dense_x[ia][:, cols] - b.dense_x[ib][:, cols])))
