"""Doubly weighted multigraph model, path costs, and deterministic planning.

Edges carry a traverse time; constraints add latent per-edge weights on top.
All times and weights are snapped to a fixed binary grid (multiples of
``QUANTUM``) by the generators and loaders, which makes every cost sum exact
in double precision: the planner, the enumeration oracle and the feature dot
product then agree bit-for-bit, so tie-breaking is well defined.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    EnumerationLimitError,
    NegativeCombinedCostError,
    PlanningError,
)

VertexId = Union[int, str]

#: Times and weights are multiples of this (2**-20 seconds, ~1 microsecond).
QUANTUM = 2.0**-20
_SCALE = 2.0**20


def snap(x: float) -> float:
    """Round a scalar to the binary grid."""
    return round(x * _SCALE) / _SCALE


def snap_down(x: float) -> float:
    """Round a scalar toward -inf on the binary grid."""
    return math.floor(x * _SCALE) / _SCALE


def snap_array(a: np.ndarray) -> np.ndarray:
    return np.round(a * _SCALE) / _SCALE


@dataclass(frozen=True)
class Edge:
    id: int
    tail: VertexId
    head: VertexId
    time: float


@dataclass(frozen=True)
class Constraint:
    """An edge subset with an interval for its hidden per-edge weight."""

    id: int
    edge_ids: frozenset[int]
    weight_lo: float
    weight_hi: float
    kind: str = "generic"
    true_weight: float | None = None

    def __post_init__(self):
        if not self.edge_ids:
            raise ValueError(f"constraint {self.id}: edge set is empty")
        if self.weight_lo > self.weight_hi:
            raise ValueError(
                f"constraint {self.id}: weight_lo {self.weight_lo} > weight_hi {self.weight_hi}"
            )
        if self.true_weight is not None and not (
            self.weight_lo <= self.true_weight <= self.weight_hi
        ):
            raise ValueError(
                f"constraint {self.id}: true_weight {self.true_weight} outside "
                f"[{self.weight_lo}, {self.weight_hi}]"
            )


@dataclass(frozen=True)
class TaskSpec:
    start: VertexId
    goal: VertexId

    def __post_init__(self):
        if self.start == self.goal:
            raise ValueError("task start and goal must differ")


@dataclass
class EnvironmentGraph:
    """Directed multigraph with per-edge traverse times.

    Treated as immutable after construction; derived indexes are cached.
    Edge ids must be dense integers 0..m-1 (``graph_from_edges`` assigns them).
    """

    name: str
    vertices: list[VertexId]
    edges: list[Edge]
    coords: dict[VertexId, tuple[float, float]] | None = None

    @cached_property
    def vertex_set(self) -> set[VertexId]:
        return set(self.vertices)

    @cached_property
    def vertex_index(self) -> dict[VertexId, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def out_edges(self) -> dict[VertexId, list[Edge]]:
        out: dict[VertexId, list[Edge]] = {v: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: e.id):
            out[e.tail].append(e)
        return out

    @cached_property
    def in_edges(self) -> dict[VertexId, list[Edge]]:
        inc: dict[VertexId, list[Edge]] = {v: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: e.id):
            inc[e.head].append(e)
        return inc

    def edge(self, edge_id: int) -> Edge:
        e = self.edges[edge_id]
        if e.id != edge_id:
            raise ValueError("edge ids are not dense; rebuild via graph_from_edges")
        return e


def graph_from_edges(
    name: str,
    edge_tuples: Iterable[tuple[VertexId, VertexId, float]],
    coords: dict[VertexId, tuple[float, float]] | None = None,
    extra_vertices: Iterable[VertexId] = (),
) -> EnvironmentGraph:
    """Build a graph assigning dense edge ids in the given order."""
    edges = [
        Edge(i, tail, head, snap(t)) for i, (tail, head, t) in enumerate(edge_tuples)
    ]
    seen: dict[VertexId, None] = {}
    for e in edges:
        seen.setdefault(e.tail)
        seen.setdefault(e.head)
    for v in extra_vertices:
        seen.setdefault(v)
    return EnvironmentGraph(name, list(seen), edges, coords)


@dataclass(frozen=True)
class PathRecord:
    """A simple path: its edge sequence, violation counts and total time."""

    edge_ids: tuple[int, ...]
    violations: tuple[int, ...]
    total_time: float

    @property
    def violations_array(self) -> np.ndarray:
        return np.asarray(self.violations, dtype=np.float64)


@dataclass
class ValidationReport:
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues


def _reachable(graph: EnvironmentGraph, root: VertexId, reverse: bool) -> set[VertexId]:
    adj = graph.in_edges if reverse else graph.out_edges
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for e in adj[v]:
            w = e.tail if reverse else e.head
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def validate_graph(graph: EnvironmentGraph) -> ValidationReport:
    """Check every structural invariant; returns a report, never raises."""
    report = ValidationReport()
    if len(set(graph.vertices)) != len(graph.vertices):
        report.issues.append("duplicate vertex ids")
    ids = [e.id for e in graph.edges]
    if sorted(ids) != list(range(len(ids))):
        report.issues.append("edge ids must be dense integers 0..m-1")
    vset = set(graph.vertices)
    structural_ok = True
    for e in graph.edges:
        if e.tail == e.head:
            report.issues.append(f"edge {e.id}: self-loop forbidden")
        if e.tail not in vset or e.head not in vset:
            report.issues.append(f"edge {e.id}: endpoint not in vertex list")
            structural_ok = False
        if not (e.time > 0.0 and math.isfinite(e.time)):
            report.issues.append(f"edge {e.id}: traverse time must be positive finite")
    if graph.vertices and structural_ok:
        root = graph.vertices[0]
        fwd = _reachable(graph, root, reverse=False)
        bwd = _reachable(graph, root, reverse=True)
        if len(fwd) != len(graph.vertices) or len(bwd) != len(graph.vertices):
            report.issues.append("not strongly connected")
    return report


def violation_vector(
    edge_ids: Sequence[int],
    constraints: Sequence[Constraint],
    graph: EnvironmentGraph | None = None,
) -> np.ndarray:
    """Count, per constraint, how many of the path's edges it contains."""
    if graph is not None:
        known = {e.id for e in graph.edges}
        for eid in edge_ids:
            if eid not in known:
                raise ValueError(f"unknown edge id {eid}")
    phi = np.zeros(len(constraints), dtype=np.float64)
    for k, c in enumerate(constraints):
        phi[k] = sum(1 for eid in edge_ids if eid in c.edge_ids)
    return phi


def path_cost(path: PathRecord, weights: np.ndarray) -> float:
    """Total cost of a path: violation counts dotted with weights, plus time."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (len(path.violations),):
        raise ValueError(
            f"weight vector has dimension {w.shape}, path has {len(path.violations)} features"
        )
    return float(np.dot(path.violations_array, w) + path.total_time)


class Planner:
    """Deterministic minimum-cost planner over a graph + constraint set.

    Combined edge cost is traverse time plus the weights of all constraints
    containing the edge. Ties are broken by lower total time, then by the
    lexicographically smallest edge-id sequence, so the output is a pure
    function of the inputs.
    """

    def __init__(self, graph: EnvironmentGraph, constraints: Sequence[Constraint]):
        ids = [e.id for e in graph.edges]
        if sorted(ids) != list(range(len(ids))):
            raise ValueError("planner requires dense edge ids 0..m-1")
        self.graph = graph
        self.constraints = list(constraints)
        m = len(graph.edges)
        d = len(self.constraints)
        by_id = sorted(graph.edges, key=lambda e: e.id)
        self.times = np.array([e.time for e in by_id], dtype=np.float64)
        # 0/1 membership, shape (d, m); column e is edge e's feature vector.
        self.membership = np.zeros((d, m), dtype=np.float64)
        for k, c in enumerate(self.constraints):
            for eid in c.edge_ids:
                if eid < 0 or eid >= m:
                    raise ValueError(
                        f"constraint {c.id} references unknown edge id {eid}"
                    )
                self.membership[k, eid] = 1.0
        vidx = graph.vertex_index
        self._n = len(graph.vertices)
        # (edge id, other-endpoint vertex index), sorted by edge id.
        self._out: list[list[tuple[int, int]]] = [[] for _ in range(self._n)]
        self._in: list[list[tuple[int, int]]] = [[] for _ in range(self._n)]
        for e in by_id:
            self._out[vidx[e.tail]].append((e.id, vidx[e.head]))
            self._in[vidx[e.head]].append((e.id, vidx[e.tail]))
        self._edge_time = self.times  # alias, indexed by edge id

    def combined_costs(self, weights: np.ndarray) -> np.ndarray:
        """Per-edge cost t(e) + sum of weights of constraints containing e."""
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(self.constraints),):
            raise ValueError(
                f"weight vector has dimension {w.shape}, expected {len(self.constraints)}"
            )
        costs = self.times + w @ self.membership
        self._check_nonnegative(costs)
        return costs

    def _check_nonnegative(self, costs: np.ndarray) -> None:
        worst = int(np.argmin(costs))
        if costs[worst] < 0.0:
            on_edge = [
                c.id for k, c in enumerate(self.constraints) if self.membership[k, worst]
            ]
            raise NegativeCombinedCostError(worst, float(costs[worst]), on_edge)

    def solve(self, weights: np.ndarray, task: TaskSpec) -> PathRecord:
        return self.solve_with_costs(self.combined_costs(weights), task)

    def solve_with_costs(self, costs: np.ndarray, task: TaskSpec) -> PathRecord:
        """Plan with precomputed combined edge costs (caller checked them)."""
        vidx = self.graph.vertex_index
        try:
            start = vidx[task.start]
            goal = vidx[task.goal]
        except KeyError as exc:
            raise PlanningError(f"task vertex {exc.args[0]!r} not in graph") from exc
        rcost, rtime = self._reverse_labels(costs, goal)
        if not math.isfinite(rcost[start]):
            raise PlanningError(f"goal {task.goal!r} unreachable from {task.start!r}")
        edge_ids = self._extract(costs, start, goal, rcost, rtime)
        phi = self.membership[:, edge_ids].sum(axis=1) if edge_ids else np.zeros(
            len(self.constraints)
        )
        total_time = 0.0
        for eid in edge_ids:
            total_time += self._edge_time[eid]
        return PathRecord(tuple(edge_ids), tuple(int(x) for x in phi), float(total_time))

    def _reverse_labels(self, costs, goal):
        """Lexicographic (cost, time) Dijkstra on the reversed graph."""
        n = self._n
        inf = math.inf
        rcost = [inf] * n
        rtime = [inf] * n
        done = [False] * n
        rcost[goal] = 0.0
        rtime[goal] = 0.0
        heap = [(0.0, 0.0, goal)]
        times = self._edge_time
        while heap:
            c, t, v = heapq.heappop(heap)
            if done[v]:
                continue
            done[v] = True
            for eid, u in self._in[v]:
                if done[u]:
                    continue
                nc = c + costs[eid]
                nt = t + times[eid]
                if nc < rcost[u] or (nc == rcost[u] and nt < rtime[u]):
                    rcost[u] = nc
                    rtime[u] = nt
                    heapq.heappush(heap, (nc, nt, u))
        return rcost, rtime

    def _extract(self, costs, start, goal, rcost, rtime):
        """Walk the lex-smallest edge sequence among optimal paths.

        At each vertex the remaining optimum equals its reverse label exactly
        (quantized arithmetic), so the first edge whose extension preserves
        both totals is always safe to take.
        """
        times = self._edge_time
        edge_ids: list[int] = []
        u = start
        acc_c = 0.0
        acc_t = 0.0
        target_c = rcost[start]
        target_t = rtime[start]
        while u != goal:
            for eid, v in self._out[u]:
                if (
                    acc_c + costs[eid] + rcost[v] == target_c
                    and acc_t + times[eid] + rtime[v] == target_t
                ):
                    edge_ids.append(eid)
                    acc_c += costs[eid]
                    acc_t += times[eid]
                    u = v
                    break
            else:  # pragma: no cover - unreachable if labels are consistent
                raise PlanningError("optimal-path extraction failed")
        return edge_ids


def shortest_path(
    graph: EnvironmentGraph,
    constraints: Sequence[Constraint],
    weights: np.ndarray,
    task: TaskSpec,
) -> PathRecord:
    """Minimum-cost path under combined edge costs; deterministic tie-breaks."""
    return Planner(graph, constraints).solve(weights, task)


def path_record_from_edges(
    graph: EnvironmentGraph,
    constraints: Sequence[Constraint],
    edge_ids: Sequence[int],
    task: TaskSpec | None = None,
) -> PathRecord:
    """Build a PathRecord from an explicit edge sequence, validating the chain."""
    if not edge_ids:
        raise ValueError("path must contain at least one edge")
    if len(set(edge_ids)) != len(edge_ids):
        raise ValueError("path edges must be distinct")
    prev_head = None
    for eid in edge_ids:
        e = graph.edge(eid)
        if prev_head is not None and e.tail != prev_head:
            raise ValueError(f"edge {eid} does not continue the path")
        prev_head = e.head
    if task is not None:
        if graph.edge(edge_ids[0]).tail != task.start:
            raise ValueError("path does not start at the task start")
        if graph.edge(edge_ids[-1]).head != task.goal:
            raise ValueError("path does not end at the task goal")
    phi = violation_vector(edge_ids, constraints, graph)
    total_time = 0.0
    for eid in edge_ids:
        total_time += graph.edge(eid).time
    return PathRecord(tuple(edge_ids), tuple(int(x) for x in phi), total_time)


def enumerate_paths(
    graph: EnvironmentGraph,
    constraints: Sequence[Constraint],
    task: TaskSpec,
    max_count: int = 100_000,
) -> list[PathRecord]:
    """All simple start->goal paths, in lexicographic edge-id order.

    Ground-truth oracle for small instances; aborts once more than
    ``max_count`` paths exist, since the count can be exponential.
    """
    if task.start not in graph.vertex_set or task.goal not in graph.vertex_set:
        raise ValueError("task endpoints must exist in the graph")
    out = graph.out_edges
    results: list[PathRecord] = []
    path_edges: list[int] = []
    visited = {task.start}

    def dfs(v: VertexId) -> None:
        if v == task.goal:
            results.append(path_record_from_edges(graph, constraints, path_edges))
            if len(results) > max_count:
                raise EnumerationLimitError(
                    f"instance too large: more than {max_count} paths"
                )
            return
        for e in out[v]:
            if e.head in visited:
                continue
            visited.add(e.head)
            path_edges.append(e.id)
            dfs(e.head)
            path_edges.pop()
            visited.remove(e.head)

    dfs(task.start)
    return results


def weight_box(constraints: Sequence[Constraint]) -> tuple[np.ndarray, np.ndarray]:
    """Per-constraint (lower, upper) sampling bounds, ordered by constraint position."""
    lo = np.array([c.weight_lo for c in constraints], dtype=np.float64)
    hi = np.array([c.weight_hi for c in constraints], dtype=np.float64)
    return lo, hi
