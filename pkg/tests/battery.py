"""Small random instances used across the statistical and oracle test suites."""
from __future__ import annotations

import numpy as np

from pathpref.graph import Constraint, TaskSpec, graph_from_edges, snap
from pathpref.regions import sample_regions
from pathpref.scenarios import Scenario


def random_instance(seed, n_vertices=None, n_constraints=None, extra_edges=None):
    """A random strongly connected multigraph instance with constraint zones.

    Vertices sit on a ring (guaranteeing strong connectivity) with random
    chords and occasional parallel duplicates; times and weight bounds are
    generic random floats so cost ties never occur by accident.
    """
    rng = np.random.default_rng(seed)
    n = int(n_vertices or rng.integers(4, 13))
    edge_tuples = []
    for v in range(n):
        edge_tuples.append((v, (v + 1) % n, float(rng.uniform(1.0, 10.0))))
    n_extra = int(extra_edges if extra_edges is not None else rng.integers(n, 2 * n))
    for _ in range(n_extra):
        a = int(rng.integers(n))
        b = int(rng.integers(n))
        if a == b:
            continue
        edge_tuples.append((a, b, float(rng.uniform(1.0, 10.0))))
    if rng.random() < 0.5 and len(edge_tuples) > n:
        dup = edge_tuples[int(rng.integers(n, len(edge_tuples)))]
        edge_tuples.append((dup[0], dup[1], float(rng.uniform(1.0, 10.0))))
    graph = graph_from_edges(f"rand-{seed}", edge_tuples)
    m = len(graph.edges)
    d = int(n_constraints or rng.integers(1, 4))
    constraints = []
    for k in range(d):
        size = int(rng.integers(1, max(2, m // 2)))
        eids = frozenset(int(x) for x in rng.choice(m, size=size, replace=False))
        hi = snap(float(rng.uniform(5.0, 20.0)))
        constraints.append(Constraint(k, eids, 0.0, hi))
    start = 0
    goal = int(rng.integers(1, n))
    task = TaskSpec(start, goal)
    scenario = Scenario(f"rand-{seed}", graph, constraints, [task])
    return scenario


def battery_instance(seed, min_regions=2, max_regions=6, sample_count=1000,
                     max_tries=50):
    """A random instance whose sampled region count lands in the given range."""
    for attempt in range(max_tries):
        scenario = random_instance((seed, attempt))
        rs = sample_regions(
            scenario.graph, scenario.constraints, scenario.tasks[0],
            sample_count, seed=int(np.random.SeedSequence((seed, attempt, 7)).generate_state(1)[0]),
        )
        if min_regions <= len(rs) <= max_regions:
            return scenario, rs
    raise RuntimeError(f"no battery instance found for seed {seed}")


def standard_battery(n_instances=5, sample_count=1000):
    """The fixed battery: deterministic seeds, 2-6 regions each."""
    return [
        battery_instance(100 + i, sample_count=sample_count)
        for i in range(n_instances)
    ]
