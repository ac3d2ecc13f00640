"""Simulation scenarios: topology, protocol constants, initial data, attacks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import rng
from .adversary import AttackSpec, sinusoid_attack, validate_attacks
from .graph import Graph, gen_fig1
from .protocol import ProtocolParams

logger = logging.getLogger(__name__)

DEFAULT_MAX_EVENTS = 10**8


class ScenarioError(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("invalid scenario: " + "; ".join(self.problems))


@dataclass(frozen=True)
class Scenario:
    graph: Graph
    params: ProtocolParams
    x0: tuple[float, ...]
    t0: tuple[float, ...]
    t_init: float
    t_end: float
    attacks: tuple[AttackSpec, ...] = ()
    seed: int = 0
    output_dt: float = 0.01
    stress: bool = False
    max_events: int = DEFAULT_MAX_EVENTS
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        object.__setattr__(self, "t0", tuple(float(v) for v in self.t0))
        object.__setattr__(self, "attacks", tuple(self.attacks))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def attacked(self) -> frozenset[int]:
        return frozenset(s.node for s in self.attacks)

    @property
    def normal(self) -> frozenset[int]:
        return frozenset(range(self.n)) - self.attacked

    def problems(self) -> list[str]:
        n = self.n
        out = []
        if n < 1:
            out.append("graph has no nodes")
        if len(self.x0) != n:
            out.append(f"x0 has {len(self.x0)} entries, expected {n}")
        if len(self.t0) != n:
            out.append(f"t0 has {len(self.t0)} entries, expected {n}")
        if len(self.params.delta_min) != n:
            out.append(f"delta_min has {len(self.params.delta_min)} entries, expected {n}")
        if out:
            return out
        if self.t_init < 0:
            out.append("t_init must be non-negative")
        if min(self.t0) != 0.0:
            out.append(f"earliest activation time must be 0, got {min(self.t0)}")
        late = [i for i, t in enumerate(self.t0) if t > self.t_init or t < 0]
        if late:
            out.append(f"activation times outside [0, t_init] for nodes {late}")
        bad = self.params.bound_violations(self.graph.degrees)
        if bad:
            out.append(f"delta_min exceeds epsilon/(4 d_i) at nodes {bad}")
        if self.t_end < 0:
            out.append("t_end must be non-negative")
        if not self.output_dt > 0:
            out.append("output_dt must be positive")
        out += validate_attacks(self.attacks, n, self.params.F, self.params.delta_min, self.stress)
        if not self.graph.connected:
            logger.warning("scenario graph is disconnected")
        return out

    def validate(self) -> "Scenario":
        problems = self.problems()
        if problems:
            raise ScenarioError(problems)
        return self

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)


def random_activation(seed: int, n: int, t_init: float) -> tuple[float, ...]:
    """Uniform draws on ``[0, t_init]`` shifted so the earliest node starts at 0."""
    draws = rng.uniform_per_node(seed, n, "t0", 0.0, t_init)
    first = min(draws)
    return tuple(t - first for t in draws)


def build(
    graph: Graph,
    epsilon: float,
    F: int,
    *,
    t_end: float,
    seed: int = 0,
    x0: Sequence[float] | None = None,
    x0_range: tuple[float, float] = (0.0, 1.0),
    t0: Sequence[float] | None = None,
    t_init: float = 0.0,
    attacks: Sequence[AttackSpec] = (),
    delta_min: Sequence[float] | None = None,
    theta: float = 1.0,
    output_dt: float = 0.01,
    stress: bool = False,
    max_events: int = DEFAULT_MAX_EVENTS,
    name: str = "",
) -> Scenario:
    """Assemble and validate a scenario.

    ``x0`` defaults to seeded uniform draws on ``x0_range``. ``t0`` defaults to uniform draws on
    ``[0, t_init]``; ``delta_min`` defaults to ``epsilon / (4 d_i)``.
    """
    n = graph.n
    if x0 is None:
        x0 = rng.uniform_per_node(seed, n, "x0", *x0_range)
    if t0 is None:
        t0 = random_activation(seed, n, t_init) if t_init > 0 else (0.0,) * n
    if delta_min is None:
        params = ProtocolParams.with_max_delta_min(epsilon, F, graph.degrees, theta)
    else:
        params = ProtocolParams(epsilon, F, tuple(delta_min), theta)
    if any(d == 0 for d in graph.degrees):
        logger.warning("isolated nodes present; their interval bound uses d=1")
    sc = Scenario(
        graph=graph, params=params, x0=tuple(x0), t0=tuple(t0), t_init=t_init, t_end=t_end,
        attacks=tuple(attacks), seed=seed, output_dt=output_dt, stress=stress,
        max_events=max_events, name=name,
    )
    return sc.validate()


FIG1_ATTACKER = 5  # node G


def fig1_experiment(
    seed: int,
    attacks: Sequence[AttackSpec] | None = None,
    reduced: bool = False,
    t_end: float = 10.0,
    output_dt: float = 0.01,
) -> Scenario:
    """Seven-node benchmark with F=1, eps=0.01, t_init=0.15.

    Default attacker: node G drives ``10 sin(10 pi t)``.
    """
    if attacks is None:
        attacks = [sinusoid_attack(FIG1_ATTACKER)]
    return build(
        gen_fig1(reduced), 0.01, 1, t_end=t_end, seed=seed, t_init=0.15,
        attacks=attacks, output_dt=output_dt,
        name="fig1_reduced" if reduced else "fig1",
    )


__all__ = [
    "Scenario", "ScenarioError", "build", "fig1_experiment", "random_activation",
    "FIG1_ATTACKER",
]
