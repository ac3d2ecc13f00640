"""Undirected communication topologies and common-neighbor checks."""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

FIG1_LABELS = ("A", "B", "D", "E", "F", "G", "H")

_FIG1_EDGES = (
    "AB", "AD", "AE", "AF", "AG", "AH",
    "BD", "BF", "BG", "BH",
    "DE", "DF", "DG", "DH",
    "EF", "EG", "EH",
    "FG", "FH",
    "GH",
)
_FIG1_RED = ("AD", "AE", "BD")

GENERIC = "generic"
ACQ_TIMING = "acq_timing"


class GraphError(ValueError):
    pass


class Graph:
    """Immutable undirected graph on nodes ``0..n-1``.

    ``connected`` records the result of a BFS from node 0; a disconnected
    graph can still be built so that it can be inspected and reported.
    """

    __slots__ = ("n", "adjacency", "connected", "labels")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] | None = None):
        if n < 0:
            raise GraphError(f"node count must be non-negative, got {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise GraphError(f"self-loop on node {i}")
            adj[i].add(j)
            adj[j].add(i)
        self.n = n
        self.adjacency: tuple[frozenset[int], ...] = tuple(frozenset(a) for a in adj)
        self.labels = tuple(labels) if labels is not None else None
        self.connected = _bfs_connected(self.adjacency)

    def neighbors(self, i: int) -> frozenset[int]:
        self._check(i)
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for i in range(self.n) for j in self.adjacency[i] if i < j)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise GraphError(f"node id {i} out of range [0, {self.n})")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count}, connected={self.connected})"


def _bfs_connected(adjacency: Sequence[frozenset[int]]) -> bool:
    n = len(adjacency)
    if n == 0:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        for j in adjacency[queue.popleft()]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == n


def common_neighbors(g: Graph, i: int, j: int) -> set[int]:
    """Neighbors shared by ``i`` and ``j``."""
    if i == j:
        raise GraphError("common_neighbors needs two distinct nodes")
    return set(g.neighbors(i) & g.neighbors(j))


@dataclass
class ConnectivityReport:
    threshold: int
    min_common: int
    violating_pairs: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return not self.violating_pairs

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "min_common": self.min_common,
            "satisfied": self.satisfied,
            "violating_pairs": [list(p) for p in self.violating_pairs],
        }


def required_common(F: int, variant: str = GENERIC) -> int:
    if variant == GENERIC:
        return 3 * F + 1
    if variant == ACQ_TIMING:
        return 2 * F + 1
    raise ValueError(f"unknown variant {variant!r}")


def check_assumption(
    g: Graph,
    F: int,
    variant: str = GENERIC,
    nodes: Iterable[int] | None = None,
    threshold: int | None = None,
) -> ConnectivityReport:
    """Scan node pairs for the common-neighbor condition.

    By default every pair of distinct nodes is checked, since the set of
    normal nodes is not known in advance. Pass ``nodes`` to restrict the
    scan to pairs inside a subset. ``threshold`` overrides the value
    derived from ``F`` and ``variant``.
    """
    if F < 0:
        raise ValueError("F must be non-negative")
    if threshold is None:
        threshold = required_common(F, variant)
    members = sorted(set(nodes)) if nodes is not None else list(range(g.n))
    for v in members:
        g._check(v)
    min_common = None
    violating = []
    for i, j in itertools.combinations(members, 2):
        c = len(g.adjacency[i] & g.adjacency[j])
        if min_common is None or c < min_common:
            min_common = c
        if c < threshold:
            violating.append((i, j, c))
    if min_common is None:
        # fewer than two nodes: the condition holds vacuously
        return ConnectivityReport(threshold=threshold, min_common=threshold)
    return ConnectivityReport(threshold=threshold, min_common=min_common, violating_pairs=violating)


def gen_complete(n: int) -> Graph:
    if n < 1:
        raise GraphError("complete graph needs n >= 1")
    return Graph(n, itertools.combinations(range(n), 2))


def gen_clique_core(lam: int, k: int) -> Graph:
    """Clique on ``lam + 1`` nodes plus ``k`` nodes attached to the whole clique.

    Every pair of nodes then shares at least ``lam`` neighbors while the
    edge count grows linearly in ``k``.
    """
    if lam < 1 or k < 0:
        raise GraphError(f"clique_core needs lambda >= 1 and k >= 0, got ({lam}, {k})")
    core = range(lam + 1)
    edges = list(itertools.combinations(core, 2))
    edges += [(p, c) for p in range(lam + 1, lam + 1 + k) for c in core]
    return Graph(lam + k + 1, edges)


def gen_fig1(reduced: bool = False) -> Graph:
    """Seven-node benchmark topology, ids assigned to labels A,B,D,E,F,G,H in order.

    ``reduced=True`` drops the edges A-D, A-E and B-D.
    """
    index = {label: i for i, label in enumerate(FIG1_LABELS)}
    pairs = [e for e in _FIG1_EDGES if not (reduced and e in _FIG1_RED)]
    return Graph(len(FIG1_LABELS), [(index[a], index[b]) for a, b in pairs], labels=FIG1_LABELS)


GENERATORS = {
    "complete": lambda n: gen_complete(int(n)),
    "clique_core": lambda lam, k: gen_clique_core(int(lam), int(k)),
    "fig1": lambda: gen_fig1(False),
    "fig1_reduced": lambda: gen_fig1(True),
}


def generate(name: str, **params) -> Graph:
    try:
        factory = GENERATORS[name]
    except KeyError:
        raise GraphError(f"unknown generator {name!r}; expected one of {sorted(GENERATORS)}") from None
    if name == "clique_core":
        params = {"lam": params.get("lam", params.get("lambda")), "k": params.get("k")}
        if params["lam"] is None or params["k"] is None:
            raise GraphError("clique_core needs parameters lambda and k")
    try:
        return factory(**params)
    except TypeError as exc:
        raise GraphError(f"bad parameters for {name}: {exc}") from None


# edge-list text format: header "n <count>", then one "i j" pair per line

def dumps_edgelist(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{i} {j}" for i, j in g.edges()]
    return "\n".join(lines) + "\n"


def loads_edgelist(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphError(f"line {lineno}: expected header 'n <count>'")
            n = _parse_int(parts[1], lineno)
            continue
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'i j', got {raw!r}")
        i, j = _parse_int(parts[0], lineno), _parse_int(parts[1], lineno)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"line {lineno}: edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise GraphError(f"line {lineno}: self-loop on node {i}")
        edges.append((i, j))
    if n is None:
        raise GraphError("empty edge list: missing header 'n <count>'")
    return Graph(n, edges)


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphError(f"line {lineno}: not an integer: {tok!r}") from None


def read_edgelist(path: str | Path) -> Graph:
    return loads_edgelist(Path(path).read_text())


def write_edgelist(g: Graph, path: str | Path) -> None:
    Path(path).write_text(dumps_edgelist(g))
