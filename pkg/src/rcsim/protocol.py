"""One round of the resilient self-triggered consensus rule for a normal node.

Everything here is a pure function of its arguments. A round sorts the
perceived neighbor values, discards up to ``F`` extreme values on each side
of the node's own state, sums the remaining differences, quantizes the sum
into a control in ``{-1, 0, 1}`` and picks the next polling interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence


class NeighborSample(NamedTuple):
    id: int
    value: float
    active: bool = True


@dataclass(frozen=True)
class ProtocolParams:
    """Protocol constants shared by all nodes.

    ``delta_min`` holds the per-node lower bound on the polling interval;
    ``theta`` places the chosen interval inside the admissible band
    (1.0 picks the largest admissible interval).
    """

    epsilon: float
    F: int
    delta_min: tuple[float, ...]
    theta: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.F < 0:
            raise ValueError(f"F must be non-negative, got {self.F}")
        if not 0 < self.theta <= 1:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if any(not d > 0 for d in self.delta_min):
            raise ValueError("every delta_min must be positive")
        object.__setattr__(self, "delta_min", tuple(float(d) for d in self.delta_min))

    @classmethod
    def with_max_delta_min(cls, epsilon: float, F: int, degrees: Sequence[int], theta: float = 1.0):
        """Use the largest allowed lower bound ``epsilon / (4 d_i)`` at each node."""
        return cls(epsilon, F, tuple(epsilon / (4 * effective_degree(d)) for d in degrees), theta)

    def bound_violations(self, degrees: Sequence[int]) -> list[int]:
        """Nodes whose ``delta_min`` exceeds ``epsilon / (4 d_i)``."""
        bad = []
        for i, (dm, d) in enumerate(zip(self.delta_min, degrees)):
            limit = self.epsilon / (4 * effective_degree(d))
            if dm > limit * (1 + 1e-12):
                bad.append(i)
        return bad


class RoundDecision(NamedTuple):
    accepted: frozenset
    ave: float
    control: int
    delta: float


def effective_degree(d: int) -> int:
    # isolated nodes would divide by zero in the interval bound
    return d if d >= 1 else 1


def sort_neighbors(samples: Sequence[NeighborSample]) -> list[NeighborSample]:
    """Active samples in non-decreasing value order, ties by ascending id."""
    return sorted((s for s in samples if s.active), key=lambda s: (s.value, s.id))


def filter_extremes(x_i: float, ordered: Sequence[NeighborSample], F: int) -> set[int]:
    """Ids kept after discarding extreme values.

    Among the first ``F`` entries, those strictly below ``x_i`` are dropped;
    among the last ``F``, those strictly above ``x_i``. When the two windows
    overlap a sample can still only be dropped once.
    """
    if F <= 0:
        return {s.id for s in ordered}
    low = ordered[:F]
    high = ordered[-F:]
    removed = {s.id for s in low if s.value < x_i}
    removed.update(s.id for s in high if s.value > x_i)
    return {s.id for s in ordered if s.id not in removed}


def ave(x_i: float, accepted: Sequence[tuple[int, float]]) -> float:
    """Sum of ``value - x_i`` over accepted neighbors; exactly 0.0 when empty."""
    if not accepted:
        return 0.0
    return math.fsum(v - x_i for _, v in accepted)


def sign_eps(chi: float, epsilon: float) -> int:
    if abs(chi) < epsilon:
        return 0
    return 1 if chi > 0 else -1


def schedule_band(ave_value: float, epsilon: float, d_i: int) -> float:
    """Upper end of the admissible polling interval."""
    return max(epsilon, abs(ave_value)) / (4 * effective_degree(d_i))


def schedule_next(ave_value: float, epsilon: float, d_i: int, delta_min: float, theta: float = 1.0) -> float:
    upper = schedule_band(ave_value, epsilon, d_i)
    return max(delta_min, theta * upper)


def normal_round(
    x_i: float,
    samples: Sequence[NeighborSample],
    params: ProtocolParams,
    d_i: int,
    node: int,
) -> RoundDecision:
    ordered = sort_neighbors(samples)
    kept = filter_extremes(x_i, ordered, params.F)
    accepted = [(s.id, s.value) for s in ordered if s.id in kept]
    a = ave(x_i, accepted)
    return RoundDecision(
        accepted=frozenset(kept),
        ave=a,
        control=sign_eps(a, params.epsilon),
        delta=schedule_next(a, params.epsilon, d_i, params.delta_min[node], params.theta),
    )
