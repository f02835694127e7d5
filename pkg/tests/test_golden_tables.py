"""Row-by-row regression against the published iterate tables of the three
location benchmarks.

The example-1 table certifies its own starting point through the k=0 row
(the projection of the start and the objective value there), which places it
at (5, -2). The example-3 single-pass table prints its objective column
shifted by one row relative to its own iterates, so only its self-consistent
entries are pinned.
"""
import numpy as np
import pytest

from proxsplit.core import StepConfig
from proxsplit.problems import heron1, heron2, heron3, heron_build, heron_objective
from proxsplit.solvers import run

# k -> (primal, objective); objective None where the printed table is
# inconsistent with its own iterate column
TABLES = {
    ("h1", "dr1"): {
        0: ((5.0, -2.0), 54.418914),
        5: ((3.344027, -1.121496), 53.046330),
        10: ((3.389398, -1.185733), 53.043638),
        20: ((3.392361, -1.189747), 53.043627),
        50: ((3.392688, -1.190188), 53.043627),
    },
    ("h1", "dr2"): {
        0: ((5.0, -2.0), 54.418914),
        5: ((3.809999, -1.607451), 53.174978),
        10: ((3.441673, -1.253641), 53.046054),
        20: ((3.392712, -1.190221), 53.043627),
        50: ((3.392688, -1.190188), 53.043627),
    },
    ("h2", "dr1"): {
        0: ((0.0, 2.0, 0.0), 24.18180),
        5: ((-0.92380, 1.62587, 0.08140), 22.23482),
        10: ((-0.92525, 1.62890, 0.07875), 22.23480),
        20: ((-0.92531, 1.62907, 0.07883), 22.23480),
        50: ((-0.92531, 1.62907, 0.07883), 22.23480),
    },
    ("h2", "dr2"): {
        0: ((0.0, 2.0, 0.0), 24.18180),
        5: ((-0.93595, 1.66118, 0.09588), 22.23627),
        10: ((-0.92561, 1.62957, 0.07762), 22.23480),
        20: ((-0.92520, 1.62880, 0.07882), 22.23480),
        50: ((-0.92531, 1.62907, 0.07883), 22.23480),
    },
    ("h3", "dr1"): {
        0: ((-1.0, 6.0), 42.883775),
        5: ((-1.215422, 6.0), 42.884811),
        10: ((-1.093321, 6.0), 42.882115),
        20: ((-1.094633, 6.0), 42.882115),
        50: ((-1.094773, 6.0), 42.882115),
    },
    ("h3", "dr2"): {
        0: ((-1.0, 6.0), 42.883775),
        5: ((-1.136966, 6.0), None),
        10: ((-1.107478, 6.0), None),
        20: ((-1.094886, 6.0), None),
        50: ((-1.094773, 6.0), 42.882115),
    },
}

SETUPS = {
    "h1": (heron1, (5.0, -2.0)),
    "h2": (heron2, (0.0, 2.0, 0.0)),
    "h3": (heron3, (-1.0, 6.0)),
}

PARAMS = {
    ("h1", "dr1"): dict(tau=0.24, sigma=0.5, lam=1.8, budget=4.0),
    ("h1", "dr2"): dict(tau=0.24, sigma=0.1, lam=1.8, budget=0.25),
    ("h2", "dr1"): dict(tau=0.99, sigma=0.4, lam=1.8, budget=4.0),
    ("h2", "dr2"): dict(tau=0.59, sigma=0.05, lam=1.8, budget=0.25),
    ("h3", "dr1"): dict(tau=3.99, sigma=0.1, lam=1.7, budget=4.0),
    ("h3", "dr2"): dict(tau=0.49, sigma=0.1, lam=1.7, budget=0.25),
}

# values are printed with 6 decimals for the planar examples, 5 for the
# spatial one; tolerances cover the print rounding
TOL = {"h1": 1e-6, "h2": 1e-5, "h3": 1e-6}


@pytest.mark.parametrize("key", sorted(TABLES))
def test_table_rows(key):
    example, variant = key
    builder, x0 = SETUPS[example]
    spec = builder()
    prob = heron_build(spec)
    p = PARAMS[key]
    cfg = StepConfig(
        tau=p["tau"],
        sigmas=(p["sigma"],) * prob.m,
        lambda_schedule=p["lam"],
        max_iters=51,
        bound_budget=p["budget"],
    )
    log = run(
        prob,
        cfg,
        variant=variant,
        log_objective=lambda x: heron_objective(spec, x),
        n_iters=51,
        x0=np.array(x0),
    )
    rows = {r.n: r for r in log}
    tol = TOL[example]
    for k, (primal, objective) in TABLES[key].items():
        got = rows[k]
        assert np.abs(got.primal - np.array(primal)).max() <= tol, f"k={k} primal"
        if objective is not None:
            assert abs(got.objective - objective) <= tol, f"k={k} objective"
