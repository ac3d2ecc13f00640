"""Misbehavior models for acquisition, transmission, control and timing.

An attacked node is honest in every operation its specs do not name. A
node may carry several specs of different kinds; it still counts once
against the misbehavior budget ``F``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping

ACQUISITION = "acquisition"
TRANSMISSION = "transmission"
CONTROL = "control"
TIMING = "timing"
KINDS = (ACQUISITION, TRANSMISSION, CONTROL, TIMING)

# next-event sentinel for a node that never polls again
NEVER = math.inf


class AttackError(ValueError):
    pass


# -- value transforms (acquisition / transmission) --------------------------

@dataclass(frozen=True)
class Bias:
    b: float

    def apply(self, v, rng=None):
        return v + self.b


@dataclass(frozen=True)
class Scale:
    a: float

    def apply(self, v, rng=None):
        return self.a * v


@dataclass(frozen=True)
class Constant:
    c: float

    def apply(self, v, rng=None):
        return self.c


@dataclass(frozen=True)
class Noise:
    sigma: float

    def apply(self, v, rng=None):
        if rng is None:
            raise AttackError("noise transform needs a random stream")
        return v + self.sigma * float(rng.standard_normal())


# -- control signals ---------------------------------------------------------

@dataclass(frozen=True)
class Sinusoid:
    """``amplitude * sin(2 pi frequency t)`` at absolute time ``t``."""

    amplitude: float
    frequency: float

    def evaluate(self, t):
        return self.amplitude * math.sin(2 * math.pi * self.frequency * t)

    def integral(self, t0, t1):
        if t1 == t0:
            return 0.0
        w = 2 * math.pi * self.frequency
        if w == 0:
            return 0.0
        return (self.amplitude / w) * (math.cos(w * t0) - math.cos(w * t1))


@dataclass(frozen=True)
class ConstantSignal:
    c: float

    def evaluate(self, t):
        return self.c

    def integral(self, t0, t1):
        return (t1 - t0) * self.c


@dataclass(frozen=True)
class BangBang:
    """``+level`` on the first half of each period, ``-level`` on the second."""

    period: float
    level: float

    def __post_init__(self):
        if not self.period > 0:
            raise AttackError("bang_bang period must be positive")

    def evaluate(self, t):
        r = t % self.period
        return self.level if r < self.period / 2 else -self.level

    def _antiderivative(self, t):
        # full periods integrate to zero
        r = t % self.period
        half = self.period / 2
        if r < half:
            return self.level * r
        return self.level * (self.period - r)

    def integral(self, t0, t1):
        if t1 == t0:
            return 0.0
        return self._antiderivative(t1) - self._antiderivative(t0)


# -- timing overrides --------------------------------------------------------

@dataclass(frozen=True)
class FixedDelta:
    delta: float


@dataclass(frozen=True)
class NeverPoll:
    pass


_MODELS = {
    ACQUISITION: {"bias": Bias, "scale": Scale, "noise": Noise},
    TRANSMISSION: {"bias": Bias, "scale": Scale, "constant": Constant, "noise": Noise},
    CONTROL: {"sinusoid": Sinusoid, "constant": ConstantSignal, "bang_bang": BangBang},
    TIMING: {"fixed": FixedDelta, "never_poll": NeverPoll},
}


@dataclass(frozen=True)
class AttackSpec:
    node: int
    kind: str
    model: object

    def __post_init__(self):
        if self.kind not in _MODELS:
            raise AttackError(f"unknown attack kind {self.kind!r}; expected one of {KINDS}")
        if type(self.model) not in _MODELS[self.kind].values():
            raise AttackError(f"{type(self.model).__name__} is not a valid {self.kind} model")

    @property
    def model_name(self) -> str:
        for name, cls in _MODELS[self.kind].items():
            if type(self.model) is cls:
                return name
        raise AssertionError("unreachable")

    def to_dict(self) -> dict:
        return {"node": self.node, "kind": self.kind, "model": self.model_name, **asdict(self.model)}

    @classmethod
    def from_dict(cls, record: Mapping) -> "AttackSpec":
        record = dict(record)
        try:
            node = int(record.pop("node"))
            kind = record.pop("kind")
            name = record.pop("model")
        except KeyError as exc:
            raise AttackError(f"attack record missing field {exc.args[0]!r}") from None
        models = _MODELS.get(kind)
        if models is None:
            raise AttackError(f"unknown attack kind {kind!r}; expected one of {KINDS}")
        if name not in models:
            raise AttackError(f"unknown {kind} model {name!r}; expected one of {sorted(models)}")
        try:
            model = models[name](**{k: float(v) for k, v in record.items()})
        except TypeError as exc:
            raise AttackError(f"bad parameters for {kind}/{name}: {exc}") from None
        return cls(node, kind, model)


def sinusoid_attack(node: int, amplitude: float = 10.0, frequency: float = 5.0) -> AttackSpec:
    return AttackSpec(node, CONTROL, Sinusoid(amplitude, frequency))


def perceive(spec: AttackSpec | None, z: float, rng=None) -> float:
    if spec is None or spec.kind != ACQUISITION:
        return z
    return spec.model.apply(z, rng)


def emit(spec: AttackSpec | None, x: float, rng=None) -> float:
    if spec is None or spec.kind != TRANSMISSION:
        return x
    return spec.model.apply(x, rng)


def control_signal(spec: AttackSpec, t: float) -> float:
    _require(spec, CONTROL)
    return spec.model.evaluate(t)


def control_integral(spec: AttackSpec, t0: float, t1: float) -> float:
    _require(spec, CONTROL)
    if t1 < t0:
        raise AttackError(f"integral bounds reversed: [{t0}, {t1}]")
    return spec.model.integral(t0, t1)


def timing_override(spec: AttackSpec, delta_min: float) -> float:
    """Polling interval forced by a timing attack, or ``NEVER``."""
    _require(spec, TIMING)
    if isinstance(spec.model, NeverPoll):
        return NEVER
    if spec.model.delta < delta_min:
        raise AttackError(
            f"timing attack on node {spec.node}: interval {spec.model.delta} is below "
            f"the lower bound {delta_min}"
        )
    return spec.model.delta


def _require(spec: AttackSpec, kind: str) -> None:
    if spec.kind != kind:
        raise AttackError(f"expected a {kind} attack, got {spec.kind}")


def group_by_node(specs: Iterable[AttackSpec]) -> dict[int, dict[str, AttackSpec]]:
    """Map node -> kind -> spec; two specs of one kind on a node is an error."""
    out: dict[int, dict[str, AttackSpec]] = {}
    for s in specs:
        per = out.setdefault(s.node, {})
        if s.kind in per:
            raise AttackError(f"node {s.node} has more than one {s.kind} attack")
        per[s.kind] = s
    return out


def validate_attacks(
    specs: Iterable[AttackSpec],
    n: int,
    F: int,
    delta_min: tuple[float, ...],
    stress: bool = False,
) -> list[str]:
    """Problems with an attack list, as messages (empty when valid)."""
    specs = list(specs)
    problems = []
    try:
        grouped = group_by_node(specs)
    except AttackError as exc:
        return [str(exc)]
    for s in specs:
        if not 0 <= s.node < n:
            problems.append(f"attack on node {s.node} out of range [0, {n})")
            continue
        if s.kind == TIMING:
            try:
                timing_override(s, delta_min[s.node])
            except AttackError as exc:
                problems.append(str(exc))
    if len(grouped) > F and not stress:
        problems.append(f"{len(grouped)} misbehaving nodes exceed the budget F={F}")
    return problems
