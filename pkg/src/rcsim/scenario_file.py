"""YAML scenario files.

Sections: ``graph``, ``params``, ``nodes``, ``activation``, ``attacks``,
``run``. See ``scenarios/`` for complete examples. Validation errors carry
the line of the offending entry.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import yaml

from . import rng
from .adversary import AttackError, AttackSpec
from .graph import Graph, GraphError, generate, read_edgelist
from .scenario import DEFAULT_MAX_EVENTS, Scenario, ScenarioError, build, random_activation

_UNIFORM = re.compile(r"^\s*uniform\s*\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]\s*$")
_SECTIONS = ("name", "graph", "params", "nodes", "activation", "attacks", "run")


class ScenarioFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _line_of(root, path) -> int | None:
    """1-based line of the YAML node at ``path`` (keys and list indices)."""
    node = root
    line = node.start_mark.line + 1 if node is not None else None
    for key in path:
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == key:
                    node = v
                    line = k.start_mark.line + 1
                    break
            else:
                return line
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            return line
    return line


class ScenarioFile:
    """A parsed scenario document, resolvable to a :class:`Scenario` for any seed."""

    def __init__(self, text: str, base_dir: Path | None = None, source: str = "<string>"):
        self.text = text
        self.base_dir = base_dir or Path.cwd()
        self.source = source
        try:
            self._root = yaml.compose(text)
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ScenarioFileError(f"malformed YAML: {exc}", mark.line + 1 if mark else None) from None
        if not isinstance(data, dict):
            raise ScenarioFileError("scenario file must be a mapping of sections", 1)
        for key in data:
            if key not in _SECTIONS:
                raise ScenarioFileError(f"unknown section {key!r}", self._line(key))
        self.data = data

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioFile":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioFileError(f"cannot read {path}: {exc.strerror}") from None
        return cls(text, path.parent, str(path))

    def _line(self, *path) -> int | None:
        return _line_of(self._root, path)

    def _fail(self, message, *path):
        raise ScenarioFileError(message, self._line(*path))

    @property
    def digest(self) -> str:
        canonical = json.dumps(self.data, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def _section(self, name, required=True) -> dict:
        sec = self.data.get(name)
        if sec is None:
            if required:
                self._fail(f"missing section {name!r}")
            return {}
        if not isinstance(sec, dict):
            self._fail(f"section {name!r} must be a mapping", name)
        return sec

    def _number(self, sec, key, default=None, kind=float):
        sec_dict = self._section(sec, required=default is None)
        if key not in sec_dict:
            if default is None:
                self._fail(f"missing {sec}.{key}", sec)
            return default
        try:
            return kind(sec_dict[key])
        except (TypeError, ValueError):
            self._fail(f"{sec}.{key} must be a number, got {sec_dict[key]!r}", sec, key)

    def graph(self) -> Graph:
        sec = self._section("graph")
        try:
            if "path" in sec:
                p = Path(sec["path"])
                if not p.is_absolute():
                    p = self.base_dir / p
                return read_edgelist(p)
            if "edges" in sec:
                if "n" not in sec:
                    self._fail("inline edge list needs 'n'", "graph")
                return Graph(int(sec["n"]), [tuple(e) for e in sec["edges"]])
            if "generator" in sec:
                params = {k: v for k, v in sec.items() if k != "generator"}
                return generate(sec["generator"], **params)
        except GraphError as exc:
            self._fail(str(exc), "graph")
        except OSError as exc:
            self._fail(f"cannot read edge list: {exc}", "graph", "path")
        except (TypeError, ValueError) as exc:
            self._fail(f"bad graph entry: {exc}", "graph")
        self._fail("graph needs one of 'generator', 'edges' or 'path'", "graph")

    def _node_id(self, g: Graph, value, *path) -> int:
        if isinstance(value, str) and g.labels and value in g.labels:
            return g.labels.index(value)
        try:
            return int(value)
        except (TypeError, ValueError):
            self._fail(f"unknown node {value!r}", *path)

    def _per_node(self, value, n, names, *path):
        if isinstance(value, str):
            m = _UNIFORM.match(value)
            if not m:
                self._fail(f"expected a list or 'uniform[a,b]', got {value!r}", *path)
            try:
                lo, hi = (float(names.get(tok.strip(), tok)) for tok in m.groups())
            except ValueError:
                self._fail(f"bad bounds in {value!r}", *path)
            return lo, hi
        if not isinstance(value, list) or len(value) != n:
            self._fail(f"expected {n} values", *path)
        try:
            return [float(v) for v in value]
        except (TypeError, ValueError):
            self._fail("values must be numbers", *path)

    def build(self, seed: int | None = None) -> Scenario:
        g = self.graph()
        n = g.n
        if seed is None:
            seed = self._number("run", "seed", 0, int)
        epsilon = self._number("params", "epsilon")
        F = self._number("params", "F", kind=int)
        theta = self._number("params", "theta", 1.0)
        params_sec = self._section("params")
        dm = params_sec.get("delta_min", "max")
        if dm == "max":
            delta_min = None
        elif isinstance(dm, list) and len(dm) == n:
            delta_min = [float(v) for v in dm]
        else:
            self._fail("delta_min must be 'max' or a per-node list", "params", "delta_min")

        t_init = self._number("activation", "t_init", 0.0)
        x0_spec = self._section("nodes", required=False).get("x0", "uniform[0,1]")
        x0 = self._per_node(x0_spec, n, {}, "nodes", "x0")
        if isinstance(x0, tuple):
            x0 = rng.uniform_per_node(seed, n, "x0", *x0)
        t0_spec = self._section("activation", required=False).get("t0", "uniform[0,t_init]")
        t0 = self._per_node(t0_spec, n, {"t_init": t_init}, "activation", "t0")
        if isinstance(t0, tuple):
            if t0[0] != 0:
                self._fail("random activation times must be drawn from uniform[0,t_init]", "activation", "t0")
            t0 = random_activation(seed, n, t0[1]) if t0[1] > 0 else [0.0] * n

        attacks = []
        records = self.data.get("attacks") or []
        if not isinstance(records, list):
            self._fail("attacks must be a list", "attacks")
        for k, rec in enumerate(records):
            if not isinstance(rec, dict):
                self._fail("attack entry must be a mapping", "attacks", k)
            rec = dict(rec)
            if "node" in rec:
                rec["node"] = self._node_id(g, rec["node"], "attacks", k, "node")
            try:
                attacks.append(AttackSpec.from_dict(rec))
            except AttackError as exc:
                self._fail(str(exc), "attacks", k)

        run = self._section("run")
        try:
            return build(
                g, epsilon, F,
                t_end=self._number("run", "t_end"),
                seed=seed, x0=x0, t0=t0, t_init=t_init, attacks=attacks,
                delta_min=delta_min, theta=theta,
                output_dt=self._number("run", "output_dt", 0.01),
                stress=bool(run.get("stress", False)),
                max_events=self._number("run", "max_events", DEFAULT_MAX_EVENTS, int),
                name=str(self.data.get("name", "")),
            )
        except ScenarioError as exc:
            raise ScenarioFileError(str(exc), self._line("run")) from None
        except ValueError as exc:
            raise ScenarioFileError(str(exc), self._line("params")) from None


def load_scenario(path: str | Path, seed: int | None = None) -> Scenario:
    return ScenarioFile.load(path).build(seed)
