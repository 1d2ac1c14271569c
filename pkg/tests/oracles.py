"""Independent brute-force oracles used to pin expected values.

Everything here deliberately avoids the library's own planner/selector code
paths: plain loops, explicit tie-breaking, direct formula evaluation.
"""
from __future__ import annotations

import numpy as np

from pathpref.graph import enumerate_paths, path_cost


def best_path_by_enumeration(paths, weights):
    """Argmin over enumerated paths: cost, then time, then edge-id sequence."""
    best = None
    best_key = None
    for p in paths:
        cost = float(np.dot(np.asarray(p.violations, dtype=float), weights)) + p.total_time
        key = (cost, p.total_time, p.edge_ids)
        if best_key is None or key < best_key:
            best_key = key
            best = p
    return best, best_key[0]


def regions_by_enumeration(graph, constraints, task, samples, max_count=100_000):
    """Group samples by their enumeration-optimal path, in first-appearance order.

    Returns (list of canonical edge-id tuples, region id per sample).
    """
    paths = enumerate_paths(graph, constraints, task, max_count=max_count)
    order: dict[tuple, int] = {}
    canonical: list[tuple] = []
    assignment = np.empty(len(samples), dtype=np.int64)
    for s, w in enumerate(samples):
        best, _ = best_path_by_enumeration(paths, w)
        rid = order.get(best.edge_ids)
        if rid is None:
            rid = len(canonical)
            order[best.edge_ids] = rid
            canonical.append(best.edge_ids)
        assignment[s] = rid
    return canonical, assignment


def side_of_region(support, normal, offset):
    """+1 if all support samples satisfy normal.w <= offset, -1 if none, 0 else."""
    n_in = 0
    for w in support:
        if float(np.dot(normal, w)) <= offset:
            n_in += 1
    if n_in == len(support):
        return 1
    if n_in == 0:
        return -1
    return 0


def likelihoods_for_choice(sides, choice, p_hat):
    out = []
    for s in sides:
        if s == 0:
            out.append(0.5)
        elif (s == 1) == (choice == "i"):
            out.append(p_hat)
        else:
            out.append(1.0 - p_hat)
    return out


def merr_expected_sum_q(q, sides, p_hat):
    """Expected post-feedback sum of unnormalized measures, by explicit loops."""
    total = sum(q)
    expected = 0.0
    for choice in ("i", "j"):
        lik = likelihoods_for_choice(sides, choice, p_hat)
        a = sum(l * qq for l, qq in zip(lik, q))
        prob_choice = a / total
        expected += prob_choice * a
    return expected


def merr_oracle_select(q, sides_by_candidate, p_hat):
    """Candidate with minimal expected sum q; ties to the lowest region id."""
    best_j = None
    best_val = None
    for j in sorted(sides_by_candidate):
        val = merr_expected_sum_q(q, sides_by_candidate[j], p_hat)
        if best_val is None or val < best_val:
            best_val = val
            best_j = j
    return best_j, best_val


def two_region_closed_form(n, k, p_hat):
    """Posterior of the favored region after n observations, k of them in favor.

    1 / (1 + (p/(1-p))**(n-2k)) with equal priors.
    """
    ratio = p_hat / (1.0 - p_hat)
    return 1.0 / (1.0 + ratio ** (n - 2 * k))


def batch_posterior(prior, likelihood_rows):
    """Linear-space product posterior: prior * prod(likelihoods), normalized."""
    q = list(prior)
    for row in likelihood_rows:
        q = [a * b for a, b in zip(q, row)]
    total = sum(q)
    return [x / total for x in q]


def reachable_everywhere(graph):
    """Brute-force strong-connectivity check: BFS from every vertex."""
    for root in graph.vertices:
        seen = {root}
        frontier = [root]
        while frontier:
            v = frontier.pop()
            for e in graph.edges:
                if e.tail == v and e.head not in seen:
                    seen.add(e.head)
                    frontier.append(e.head)
        if len(seen) != len(graph.vertices):
            return False
    return True
