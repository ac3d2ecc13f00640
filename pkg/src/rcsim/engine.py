"""Event-driven continuous-time simulation of the whole network.

Between events every normal node moves with a constant slope, so its state
is kept as an anchor ``(x, t, u)`` and evaluated exactly. A node driven by
a control attack is anchored at its activation and advanced through the
closed-form integral of its signal. Nothing is integrated numerically.
"""

from __future__ import annotations

import heapq
import logging
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import rng
from .adversary import (
    ACQUISITION, CONTROL, NEVER, TIMING, TRANSMISSION,
    emit, group_by_node, perceive, timing_override,
)
from .protocol import NeighborSample, normal_round
from .scenario import Scenario

logger = logging.getLogger(__name__)

ACTIVATION = "activation"
UPDATE = "update"

EVENT_COLUMNS = ("t", "node", "kind", "x", "u", "ave", "accepted_count", "delta")


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Event:
    time: float
    node: int
    kind: str = UPDATE


@dataclass
class NodeRuntime:
    x: float
    u_held: float
    active: bool
    next_event: float
    last_advanced: float


class Trace:
    """Event log plus dense samples of one run.

    ``event_states`` holds the full state vector at each event instant so
    that checks over the trace see every breakpoint of the piecewise-affine
    normal trajectories.
    """

    def __init__(self, scenario, events, event_states, dense_t, dense_x, dense_u):
        self.scenario = scenario
        self.events = events
        self.event_states = event_states
        self.dense_t = dense_t
        self.dense_x = dense_x
        self.dense_u = dense_u
        self._rows = None

    @property
    def n(self) -> int:
        return self.dense_x.shape[1]

    @property
    def event_times(self) -> np.ndarray:
        return np.array([e[0] for e in self.events], dtype=float)

    @property
    def event_nodes(self) -> np.ndarray:
        return np.array([e[1] for e in self.events], dtype=int)

    def node_events(self, i: int) -> list[tuple]:
        return [e for e in self.events if e[1] == i]

    def event_counts(self) -> list[int]:
        c = Counter(e[1] for e in self.events)
        return [c.get(i, 0) for i in range(self.n)]

    def rows(self) -> tuple[np.ndarray, np.ndarray]:
        """All (time, state-vector) rows, dense and event, in time order."""
        if self._rows is None:
            self._rows = self._merge_rows()
        return self._rows

    def _merge_rows(self):
        if self.events:
            t = np.concatenate([self.dense_t, self.event_times])
            x = np.vstack([self.dense_x, self.event_states])
        else:
            t, x = self.dense_t, self.dense_x
        order = np.argsort(t, kind="stable")
        return t[order], x[order]


class Simulation:
    """Mutable engine state for one scenario.

    Build it (this seeds one activation event per node), then call
    :meth:`step` until :attr:`done`, or just :meth:`run`.
    """

    def __init__(self, scenario: Scenario):
        self.sc = scenario.validate()
        g = scenario.graph
        n = g.n
        self.n = n
        self.nbrs = [sorted(a) for a in g.adjacency]
        self.deg = list(g.degrees)
        self.t0 = list(scenario.t0)
        self.params = scenario.params
        self.attacks = group_by_node(scenario.attacks)

        self.xa = list(scenario.x0)
        self.ta = list(scenario.t0)
        self.u = [0.0] * n
        self.active = [False] * n
        self.next_event = list(scenario.t0)
        self.t = 0.0
        self.n_events = 0

        self.control = [self.attacks.get(i, {}).get(CONTROL) for i in range(n)]
        self.acq = [self.attacks.get(i, {}).get(ACQUISITION) for i in range(n)]
        self.tx = [self.attacks.get(i, {}).get(TRANSMISSION) for i in range(n)]
        self.timing = [self.attacks.get(i, {}).get(TIMING) for i in range(n)]
        self.acq_rng = [rng.stream(scenario.seed, i, "acquisition") if self.acq[i] else None for i in range(n)]
        self.tx_rng = [rng.stream(scenario.seed, i, "transmission") if self.tx[i] else None for i in range(n)]
        self._tx_cache: dict[int, tuple[float, float]] = {}

        self.queue: list[tuple[float, int, str]] = [(t, i, ACTIVATION) for i, t in enumerate(self.t0)]
        heapq.heapify(self.queue)

        self.events: list[tuple] = []
        self.event_states: list[tuple[float, ...]] = []
        self.dense_t: list[float] = []
        self.dense_x: list[tuple[float, ...]] = []
        self.dense_u: list[tuple[float, ...]] = []

    # -- state ---------------------------------------------------------------

    def state(self, i: int, t: float) -> float:
        spec = self.control[i]
        if spec is not None:
            if t <= self.t0[i]:
                return self.xa[i]
            return self.xa[i] + spec.model.integral(self.t0[i], t)
        return self.xa[i] + self.u[i] * (t - self.ta[i])

    def states(self, t: float) -> tuple[float, ...]:
        xa, ta, u, control, t0 = self.xa, self.ta, self.u, self.control, self.t0
        out = []
        for i in range(self.n):
            spec = control[i]
            if spec is None:
                out.append(xa[i] + u[i] * (t - ta[i]))
            elif t <= t0[i]:
                out.append(xa[i])
            else:
                out.append(xa[i] + spec.model.integral(t0[i], t))
        return tuple(out)

    def control_value(self, i: int, t: float) -> float:
        spec = self.control[i]
        if spec is not None:
            return spec.model.evaluate(t) if t >= self.t0[i] else 0.0
        return self.u[i]

    def output(self, j: int, t: float) -> float:
        """Value broadcast by ``j`` at ``t``; one value per instant for all receivers."""
        x = self.state(j, t)
        spec = self.tx[j]
        if spec is None:
            return x
        cached = self._tx_cache.get(j)
        if cached is not None and cached[0] == t:
            return cached[1]
        z = emit(spec, x, self.tx_rng[j])
        self._tx_cache[j] = (t, z)
        return z

    @property
    def x(self) -> list[float]:
        return list(self.states(self.t))

    def runtime(self, i: int) -> NodeRuntime:
        return NodeRuntime(
            x=self.state(i, self.t),
            u_held=self.control_value(i, self.t),
            active=self.active[i],
            next_event=self.next_event[i],
            last_advanced=self.t,
        )

    @property
    def pending(self) -> list[Event]:
        return [Event(t, i, k) for t, i, k in sorted(self.queue)]

    @property
    def done(self) -> bool:
        return not self.queue

    # -- stepping ------------------------------------------------------------

    def advance_to(self, t: float) -> None:
        if t < self.t:
            raise SimulationError(f"cannot move time backwards from {self.t} to {t}")
        # trajectories are closed-form in t; only the clock moves
        self.t = t

    def step(self) -> Event:
        if not self.queue:
            raise SimulationError("event queue is empty")
        t, i, kind = heapq.heappop(self.queue)
        self.advance_to(t)
        self.n_events += 1
        if self.n_events > self.sc.max_events:
            counts = Counter(e[1] for e in self.events)
            densest = counts.most_common(1)[0][0] if counts else i
            raise SimulationError(
                f"event budget of {self.sc.max_events} exceeded; densest node is {densest}"
            )
        if kind == ACTIVATION:
            self.active[i] = True
        self._round(i, t, kind)
        return Event(t, i, kind)

    def _round(self, i: int, t: float, kind: str) -> None:
        snap = self.states(t)
        x_i = snap[i]
        acq, acq_rng = self.acq[i], self.acq_rng[i]
        t0, tx = self.t0, self.tx
        samples = []
        for j in self.nbrs[i]:
            if t >= t0[j]:
                z = snap[j] if tx[j] is None else self.output(j, t)
                if acq is not None:
                    z = perceive(acq, z, acq_rng)
                samples.append(NeighborSample(j, z, True))
        decision = normal_round(x_i, samples, self.params, self.deg[i], i)

        delta = decision.delta
        if self.timing[i] is not None:
            delta = timing_override(self.timing[i], self.params.delta_min[i])

        if self.control[i] is not None:
            u_log = self.control[i].model.evaluate(t)
        else:
            self.xa[i] = x_i
            self.ta[i] = t
            self.u[i] = float(decision.control)
            u_log = self.u[i]

        nxt = t + delta if delta != NEVER else NEVER
        self.next_event[i] = nxt
        if nxt != NEVER:
            heapq.heappush(self.queue, (nxt, i, UPDATE))

        self.events.append((t, i, kind, x_i, u_log, decision.ave, len(decision.accepted), delta))
        self.event_states.append(snap)

    def sample(self, t: float) -> None:
        self.advance_to(t)
        self.dense_t.append(t)
        self.dense_x.append(self.states(t))
        self.dense_u.append(tuple(self.control_value(i, t) for i in range(self.n)))

    def run(self) -> Trace:
        t_end = self.sc.t_end
        grid = output_grid(t_end, self.sc.output_dt)
        g = 0
        queue = self.queue
        while queue and queue[0][0] <= t_end:
            te = queue[0][0]
            while g < len(grid) and grid[g] < te:
                self.sample(grid[g])
                g += 1
            self.step()
        while g < len(grid):
            self.sample(grid[g])
            g += 1
        self.advance_to(t_end)
        return self.trace()

    def trace(self) -> Trace:
        n = self.n
        return Trace(
            self.sc,
            self.events,
            np.array(self.event_states, dtype=float).reshape(-1, n),
            np.array(self.dense_t, dtype=float),
            np.array(self.dense_x, dtype=float).reshape(-1, n),
            np.array(self.dense_u, dtype=float).reshape(-1, n),
        )


def output_grid(t_end: float, dt: float) -> list[float]:
    """Dense sampling instants ``k*dt`` up to ``t_end``, plus ``t_end`` itself."""
    k_max = int(math.floor(t_end / dt + 1e-9))
    grid = [k * dt for k in range(k_max + 1)]
    grid = [t for t in grid if t <= t_end]
    if not grid or t_end - grid[-1] > 1e-9 * dt:
        grid.append(t_end)
    else:
        grid[-1] = t_end
    return grid


def init(scenario: Scenario) -> Simulation:
    return Simulation(scenario)


def run(scenario: Scenario) -> Trace:
    return Simulation(scenario).run()
