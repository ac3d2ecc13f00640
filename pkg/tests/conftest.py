import numpy as np
import pytest

from rcsim.engine import Trace
from rcsim.graph import gen_complete
from rcsim.scenario import build

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def synthetic_trace(x_rows, t=None, x0=None, events=(), delta_min=None, attacks=()):
    """Trace with hand-written dense rows over a complete graph."""
    x_rows = np.asarray(x_rows, dtype=float)
    n = x_rows.shape[1]
    if t is None:
        t = np.arange(len(x_rows), dtype=float)
    sc = build(
        gen_complete(n), 0.01, 0, t_end=float(t[-1]),
        x0=list(x_rows[0] if x0 is None else x0), t0=[0.0] * n,
        delta_min=delta_min, attacks=attacks,
    )
    ev_states = np.empty((0, n)) if not events else np.array([x_rows[0]] * len(events))
    return Trace(sc, list(events), ev_states, np.asarray(t, dtype=float), x_rows, np.zeros_like(x_rows))


@pytest.fixture
def make_trace():
    return synthetic_trace
