"""Synthetic scenario generation and scenario file I/O.

Grid scenarios model indoor industrial layouts: free cells of a rectangular
grid, two parallel directed edges (fast/slow) per adjacency per direction,
and typed constraint zones drawn as rectangles. PRM scenarios model outdoor
maps: uniform collision-free vertices joined to their k nearest mutually
visible neighbors, with constraints over random rectangular regions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from shapely.geometry import LineString, Point, Polygon
from shapely.strtree import STRtree

from .errors import ScenarioBuildError, ScenarioFormatError
from .graph import (
    Constraint,
    Edge,
    EnvironmentGraph,
    TaskSpec,
    snap,
    snap_down,
)

KIND_COLORS = {
    "road_follow": "#2e8b57",
    "road_against": "#2e8b57",
    "speed_limit": "#e6c300",
    "avoid": "#d62728",
    "generic": "#d62728",
}

Rect = tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive cell bounds

_DIRECTIONS = {"E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1)}


@dataclass
class Scenario:
    name: str
    graph: EnvironmentGraph
    constraints: list[Constraint]
    tasks: list[TaskSpec]
    render: dict | None = None
    coverage: tuple[int, int] | None = None  # (constrained free cells, free cells)

    @property
    def coverage_fraction(self) -> float | None:
        if self.coverage is None:
            return None
        return self.coverage[0] / self.coverage[1]


@dataclass
class GridZoneSpec:
    kind: str  # avoid | speed_limit | road
    rect: Rect
    weight_hi: float = 30.0
    weight_lo: float = 0.0
    true_weight: float | None = None
    direction: str = "E"  # roads only
    follow_reward: float | None = None  # requested r for the aligned side


@dataclass
class GridScenarioConfig:
    width: int
    height: int
    fast_time: float = 1.0
    slow_time: float = 2.0
    obstacles: list[Rect] = field(default_factory=list)
    zones: list[GridZoneSpec] = field(default_factory=list)
    tasks: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)
    name: str = "grid"

    def __post_init__(self):
        if not (0 < self.fast_time < self.slow_time):
            raise ValueError("need 0 < fast_time < slow_time")


def _rect_cells(rect: Rect, width: int, height: int):
    x0, y0, x1, y1 = rect
    if not (0 <= x0 <= x1 < width and 0 <= y0 <= y1 < height):
        raise ValueError(f"rectangle {rect} outside the {width}x{height} grid")
    return {(x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1)}


def build_grid_scenario(cfg: GridScenarioConfig) -> Scenario:
    """Compile a grid config into a graph, constraints and render geometry."""
    w, h = cfg.width, cfg.height
    blocked: set[tuple[int, int]] = set()
    for rect in cfg.obstacles:
        blocked |= _rect_cells(rect, w, h)
    free = [(x, y) for y in range(h) for x in range(w) if (x, y) not in blocked]
    free_set = set(free)
    if not free:
        raise ScenarioBuildError("no free cells")

    def vid(cell):
        return cell[1] * w + cell[0]

    # 4-connectivity check on free space.
    seen = {free[0]}
    stack = [free[0]]
    while stack:
        x, y = stack.pop()
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (x + dx, y + dy)
            if nb in free_set and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != len(free):
        raise ScenarioBuildError("free space is disconnected")

    fast = snap(cfg.fast_time)
    slow = snap(cfg.slow_time)
    edges: list[Edge] = []
    for x, y in free:
        for dx, dy in ((1, 0), (0, 1)):
            nb = (x + dx, y + dy)
            if nb not in free_set:
                continue
            u, v = vid((x, y)), vid(nb)
            for a, b in ((u, v), (v, u)):
                edges.append(Edge(len(edges), a, b, fast))
                edges.append(Edge(len(edges), a, b, slow))
    fast_ids = {e.id for e in edges if e.time == fast}
    coords = {vid(c): (c[0] + 0.5, c[1] + 0.5) for c in free}
    graph = EnvironmentGraph(cfg.name, [vid(c) for c in free], edges, coords)

    cell_of = {vid(c): c for c in free}
    constraints: list[Constraint] = []
    zones_render: list[dict] = []
    follow_sets: list[tuple[GridZoneSpec, frozenset[int]]] = []
    covered: set[tuple[int, int]] = set()

    def zone_edges(cells, fast_only=False, direction=None):
        picked = []
        for e in edges:
            if fast_only and e.id not in fast_ids:
                continue
            tc, hc = cell_of[e.tail], cell_of[e.head]
            if direction is None:
                if tc in cells or hc in cells:
                    picked.append(e.id)
            else:
                if tc in cells and hc in cells:
                    if (hc[0] - tc[0], hc[1] - tc[1]) == direction:
                        picked.append(e.id)
        return frozenset(picked)

    for spec in cfg.zones:
        cells = _rect_cells(spec.rect, w, h) & free_set
        covered |= cells
        if spec.kind == "avoid":
            eids = zone_edges(cells)
            if eids:
                constraints.append(
                    Constraint(
                        len(constraints), eids, snap(spec.weight_lo),
                        snap(spec.weight_hi), "avoid", spec.true_weight,
                    )
                )
                zones_render.append(_zone_render(constraints[-1].id, "avoid", spec))
        elif spec.kind == "speed_limit":
            eids = zone_edges(cells, fast_only=True)
            if eids:
                constraints.append(
                    Constraint(
                        len(constraints), eids, snap(spec.weight_lo),
                        snap(spec.weight_hi), "speed_limit", spec.true_weight,
                    )
                )
                zones_render.append(_zone_render(constraints[-1].id, "speed_limit", spec))
        elif spec.kind == "road":
            d = _DIRECTIONS[spec.direction]
            against = zone_edges(cells, direction=(-d[0], -d[1]))
            if against:
                constraints.append(
                    Constraint(
                        len(constraints), against, snap(spec.weight_lo),
                        snap(spec.weight_hi), "road_against", spec.true_weight,
                    )
                )
                zones_render.append(_zone_render(constraints[-1].id, "road_against", spec))
            aligned = zone_edges(cells, direction=d)
            if aligned:
                follow_sets.append((spec, aligned))
        else:
            raise ValueError(f"unknown zone kind {spec.kind!r}")

    # Aligned road edges earn a reward (negative weight). Bound each reward so
    # every edge's worst-case combined cost stays nonnegative even where
    # several road bands overlap.
    neg_count: dict[int, int] = {}
    for _, eids in follow_sets:
        for eid in eids:
            neg_count[eid] = neg_count.get(eid, 0) + 1
    for spec, eids in follow_sets:
        bound = min(edges[eid].time / neg_count[eid] for eid in eids)
        reward = bound if spec.follow_reward is None else min(spec.follow_reward, bound)
        reward = snap_down(reward)
        true_w = None
        if spec.true_weight is not None:
            true_w = max(-reward, min(0.0, spec.true_weight))
        constraints.append(
            Constraint(len(constraints), eids, -reward, 0.0, "road_follow", true_w)
        )
        zones_render.append(_zone_render(constraints[-1].id, "road_follow", spec))

    tasks = []
    for start, goal in cfg.tasks:
        if start in blocked or goal in blocked:
            raise ScenarioBuildError(f"task endpoint {start}->{goal} lies in an obstacle")
        tasks.append(TaskSpec(vid(start), vid(goal)))

    render = {
        "type": "grid",
        "width": w,
        "height": h,
        "cell_size": 1.0,
        "obstacles": [list(r) for r in cfg.obstacles],
        "zones": zones_render,
        "kind_colors": KIND_COLORS,
    }
    return Scenario(
        name=cfg.name,
        graph=graph,
        constraints=constraints,
        tasks=tasks,
        render=render,
        coverage=(len(covered), len(free)),
    )


def _zone_render(constraint_id: int, kind: str, spec: GridZoneSpec) -> dict:
    x0, y0, x1, y1 = spec.rect
    out = {
        "constraint_id": constraint_id,
        "kind": kind,
        "color": KIND_COLORS[kind],
        "polygon": [[x0, y0], [x1 + 1, y0], [x1 + 1, y1 + 1], [x0, y1 + 1]],
    }
    if kind.startswith("road"):
        out["direction"] = spec.direction
    return out


@dataclass
class PrmScenarioConfig:
    width: float
    height: float
    n_vertices: int
    k_neighbors: int
    speed: float = 1.0
    obstacles: list[list[tuple[float, float]]] = field(default_factory=list)
    n_constraints: int = 0
    constraint_size: tuple[float, float] = (0.1, 0.25)  # fraction of min(w, h)
    weight_hi: float = 60.0
    seed: int = 0
    tasks: list[tuple[int, int]] | None = None  # vertex ids; farthest pair if None
    name: str = "prm"

    def __post_init__(self):
        if self.n_vertices < 2 or self.k_neighbors < 1:
            raise ValueError("need n_vertices >= 2 and k_neighbors >= 1")


def build_prm_scenario(cfg: PrmScenarioConfig) -> Scenario:
    """Random roadmap over free space; constraints over random rectangles."""
    rng = np.random.default_rng(cfg.seed)
    polys = [Polygon(p) for p in cfg.obstacles]
    tree = STRtree(polys) if polys else None

    def collides(pt: Point) -> bool:
        if tree is None:
            return False
        return any(polys[i].intersects(pt) for i in tree.query(pt))

    points = np.empty((cfg.n_vertices, 2))
    placed = 0
    attempts = 0
    while placed < cfg.n_vertices:
        attempts += 1
        if attempts > 1000 * cfg.n_vertices:
            raise ScenarioBuildError("free space too small to place roadmap vertices")
        xy = rng.random(2) * (cfg.width, cfg.height)
        if not collides(Point(xy)):
            points[placed] = xy
            placed += 1

    def visible(a: int, b: int) -> bool:
        if tree is None:
            return True
        seg = LineString([points[a], points[b]])
        return not any(polys[i].intersects(seg) for i in tree.query(seg))

    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    edge_pairs: dict[tuple[int, int], float] = {}
    for a in range(cfg.n_vertices):
        for b in np.argsort(d2[a], kind="stable")[: cfg.k_neighbors]:
            b = int(b)
            if (a, b) in edge_pairs:
                continue
            if visible(a, b):
                t = snap(float(np.sqrt(d2[a, b])) / cfg.speed)
                edge_pairs[(a, b)] = t
                edge_pairs.setdefault((b, a), t)

    # Largest strongly connected component (Kosaraju, iterative).
    order = _scc_order(cfg.n_vertices, edge_pairs)
    comp = _scc_assign(cfg.n_vertices, edge_pairs, order)
    sizes = np.bincount(comp)
    keep_comp = int(np.argmax(sizes))
    kept = [v for v in range(cfg.n_vertices) if comp[v] == keep_comp]
    kept_set = set(kept)

    edges: list[Edge] = []
    for (a, b), t in sorted(edge_pairs.items()):
        if a in kept_set and b in kept_set:
            edges.append(Edge(len(edges), a, b, t))
    coords = {v: (float(points[v, 0]), float(points[v, 1])) for v in kept}
    graph = EnvironmentGraph(cfg.name, kept, edges, coords)

    constraints: list[Constraint] = []
    zones_render: list[dict] = []
    lo_size = cfg.constraint_size[0] * min(cfg.width, cfg.height)
    hi_size = cfg.constraint_size[1] * min(cfg.width, cfg.height)
    guard = 0
    while len(constraints) < cfg.n_constraints:
        guard += 1
        if guard > 200 * max(1, cfg.n_constraints):
            raise ScenarioBuildError("could not place non-empty constraint regions")
        cx, cy = rng.random(2) * (cfg.width, cfg.height)
        sw, sh = lo_size + rng.random(2) * (hi_size - lo_size)
        x0, x1 = cx - sw / 2, cx + sw / 2
        y0, y1 = cy - sh / 2, cy + sh / 2
        inside = {
            v for v in kept if x0 <= points[v, 0] <= x1 and y0 <= points[v, 1] <= y1
        }
        eids = frozenset(
            e.id for e in edges if e.tail in inside or e.head in inside
        )
        if not eids:
            continue
        constraints.append(
            Constraint(len(constraints), eids, 0.0, snap(cfg.weight_hi), "generic")
        )
        zones_render.append(
            {
                "constraint_id": constraints[-1].id,
                "kind": "generic",
                "color": KIND_COLORS["generic"],
                "polygon": [[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
            }
        )

    if cfg.tasks is not None:
        for s, g in cfg.tasks:
            if s not in kept_set or g not in kept_set:
                raise ScenarioBuildError(
                    f"task vertex {s if s not in kept_set else g} fell outside the "
                    "largest connected component; try another seed"
                )
        tasks = [TaskSpec(s, g) for s, g in cfg.tasks]
    else:
        kept_arr = np.array(kept)
        sub = d2[np.ix_(kept_arr, kept_arr)].copy()
        sub[~np.isfinite(sub)] = 0.0
        flat = int(np.argmax(sub))
        a, b = divmod(flat, len(kept))
        tasks = [TaskSpec(int(kept_arr[a]), int(kept_arr[b]))]

    render = {
        "type": "prm",
        "width": cfg.width,
        "height": cfg.height,
        "obstacles": [[list(map(float, p)) for p in poly] for poly in cfg.obstacles],
        "zones": zones_render,
        "kind_colors": KIND_COLORS,
    }
    return Scenario(cfg.name, graph, constraints, tasks, render=render)


def _scc_order(n: int, edge_pairs: dict[tuple[int, int], float]) -> list[int]:
    out: dict[int, list[int]] = {v: [] for v in range(n)}
    for a, b in edge_pairs:
        out[a].append(b)
    seen = [False] * n
    order: list[int] = []
    for root in range(n):
        if seen[root]:
            continue
        stack = [(root, iter(out[root]))]
        seen[root] = True
        while stack:
            v, it = stack[-1]
            for w in it:
                if not seen[w]:
                    seen[w] = True
                    stack.append((w, iter(out[w])))
                    break
            else:
                order.append(v)
                stack.pop()
    return order


def _scc_assign(
    n: int, edge_pairs: dict[tuple[int, int], float], order: list[int]
) -> np.ndarray:
    rev: dict[int, list[int]] = {v: [] for v in range(n)}
    for a, b in edge_pairs:
        rev[b].append(a)
    comp = np.full(n, -1, dtype=np.int64)
    label = 0
    for root in reversed(order):
        if comp[root] != -1:
            continue
        stack = [root]
        comp[root] = label
        while stack:
            v = stack.pop()
            for w in rev[v]:
                if comp[w] == -1:
                    comp[w] = label
                    stack.append(w)
        label += 1
    return comp


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

_SCHEMA_PATH = Path(__file__).resolve().parent / "scenario.schema.json"
_schema_cache: dict | None = None


def _schema() -> dict:
    global _schema_cache
    if _schema_cache is None:
        _schema_cache = json.loads(_SCHEMA_PATH.read_text())
    return _schema_cache


def scenario_to_dict(scenario: Scenario) -> dict:
    g = scenario.graph
    vertices = []
    for v in g.vertices:
        item: dict = {"id": v}
        if g.coords and v in g.coords:
            item["x"] = g.coords[v][0]
            item["y"] = g.coords[v][1]
        vertices.append(item)
    out = {
        "name": scenario.name,
        "vertices": vertices,
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head, "time": e.time}
            for e in g.edges
        ],
        "constraints": [
            {
                "id": c.id,
                "kind": c.kind,
                "edge_ids": sorted(c.edge_ids),
                "weight_lo": c.weight_lo,
                "weight_hi": c.weight_hi,
                **({"true_weight": c.true_weight} if c.true_weight is not None else {}),
            }
            for c in scenario.constraints
        ],
        "tasks": [{"start": t.start, "goal": t.goal} for t in scenario.tasks],
    }
    if scenario.render is not None:
        out["render"] = scenario.render
    if scenario.coverage is not None:
        out["coverage"] = list(scenario.coverage)
    return out


def scenario_from_dict(doc: dict) -> Scenario:
    import jsonschema

    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ScenarioFormatError(f"schema error at {where}: {first.message}")

    coords = {}
    vertices = []
    for item in doc["vertices"]:
        vertices.append(item["id"])
        if "x" in item and "y" in item:
            coords[item["id"]] = (item["x"], item["y"])
    vset = set(vertices)
    edges = []
    for item in doc["edges"]:
        if item["tail"] not in vset or item["head"] not in vset:
            raise ScenarioFormatError(f"edge {item['id']}: unknown endpoint")
        edges.append(Edge(item["id"], item["tail"], item["head"], snap(item["time"])))
    if sorted(e.id for e in edges) != list(range(len(edges))):
        raise ScenarioFormatError("edge ids must be dense integers 0..m-1")
    eset = {e.id for e in edges}
    constraints = []
    for item in doc["constraints"]:
        missing = set(item["edge_ids"]) - eset
        if missing:
            raise ScenarioFormatError(
                f"constraint {item['id']}: unknown edge ids {sorted(missing)}"
            )
        try:
            constraints.append(
                Constraint(
                    item["id"],
                    frozenset(item["edge_ids"]),
                    snap(item["weight_lo"]),
                    snap(item["weight_hi"]),
                    item.get("kind", "generic"),
                    snap(item["true_weight"]) if item.get("true_weight") is not None else None,
                )
            )
        except ValueError as exc:
            raise ScenarioFormatError(str(exc)) from exc
    if [c.id for c in constraints] != list(range(len(constraints))):
        raise ScenarioFormatError("constraint ids must be dense integers 0..d-1")
    tasks = []
    for item in doc["tasks"]:
        if item["start"] not in vset or item["goal"] not in vset:
            raise ScenarioFormatError(f"task {item}: unknown vertex")
        try:
            tasks.append(TaskSpec(item["start"], item["goal"]))
        except ValueError as exc:
            raise ScenarioFormatError(str(exc)) from exc
    return Scenario(
        name=doc["name"],
        graph=EnvironmentGraph(doc["name"], vertices, edges, coords or None),
        constraints=constraints,
        tasks=tasks,
        render=doc.get("render"),
        coverage=tuple(doc["coverage"]) if "coverage" in doc else None,
    )


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=1))


def load_scenario(path: str | Path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

_PRESET_PARAMS = {
    # name: (n_constraints, coverage_target, generator_seed)
    "spec-A": (26, 0.33, 7),
    "spec-B": (41, 0.40, 3),
    "spec-C": (52, 0.73, 5),
}


def preset_names() -> list[str]:
    return list(_PRESET_PARAMS)


def preset_scenario(name: str) -> Scenario:
    """Deterministic 24x24 grid presets sized after the reference layouts."""
    try:
        n_constraints, coverage, seed = _PRESET_PARAMS[name]
    except KeyError:
        raise ScenarioBuildError(
            f"unknown preset {name!r}; available: {preset_names()}"
        ) from None
    return random_grid_scenario(
        name=name,
        width=24,
        height=24,
        n_constraints=n_constraints,
        coverage_target=coverage,
        seed=seed,
    )


def random_grid_scenario(
    name: str,
    width: int,
    height: int,
    n_constraints: int,
    coverage_target: float,
    seed: int,
    coverage_tolerance: float = 0.03,
    max_attempts: int = 400,
) -> Scenario:
    """Randomly place typed zones until the constraint count is exact and the
    covered fraction of free space lands within tolerance of the target."""
    rng = np.random.default_rng(seed)
    for attempt in range(max_attempts):
        cfg = _draw_grid_config(
            name, width, height, n_constraints, coverage_target, rng
        )
        if cfg is None:
            continue
        try:
            scenario = build_grid_scenario(cfg)
        except ScenarioBuildError:
            continue
        if len(scenario.constraints) != n_constraints:
            continue
        if abs(scenario.coverage_fraction - coverage_target) > coverage_tolerance:
            continue
        return scenario
    raise ScenarioBuildError(
        f"no layout with {n_constraints} constraints at coverage "
        f"{coverage_target} found in {max_attempts} attempts"
    )


def _draw_grid_config(name, width, height, n_constraints, coverage_target, rng):
    obstacles = []
    for _ in range(rng.integers(2, 5)):
        ww = int(rng.integers(2, max(3, width // 4)))
        hh = int(rng.integers(2, max(3, height // 4)))
        x0 = int(rng.integers(0, width - ww))
        y0 = int(rng.integers(0, height - hh))
        obstacles.append((x0, y0, x0 + ww - 1, y0 + hh - 1))
    blocked = set()
    for r in obstacles:
        blocked |= _rect_cells(r, width, height)
    free_total = width * height - len(blocked)
    if free_total <= 0:
        return None

    covered: set[tuple[int, int]] = set()
    zones: list[GridZoneSpec] = []
    count = 0
    tol_cells = 0.03 * free_total
    guard = 0
    while count < n_constraints:
        guard += 1
        if guard > 80 * n_constraints:
            return None
        remaining = n_constraints - count
        gap = coverage_target * free_total - len(covered)
        if gap <= 0.5:
            # Target hit; spend remaining constraints inside covered cells.
            pool = sorted(covered)
            cell = pool[int(rng.integers(len(pool)))]
            rect = (cell[0], cell[1], cell[0], cell[1])
            kind = ("avoid", "speed_limit")[int(rng.integers(2))]
            zones.append(
                GridZoneSpec(kind, rect, weight_hi=float(rng.integers(10, 50)))
            )
            count += 1
            continue
        # Inflate the per-constraint area budget: overlaps waste a growing
        # share of each zone as coverage rises.
        per_zone = 1.8 * gap / remaining
        s = max(1, int(round(np.sqrt(per_zone))))
        side_lo, side_hi = max(1, s - 1), s + 1
        kind = ["avoid", "speed_limit", "road"][int(rng.integers(3))]
        if kind == "road" and (remaining < 2 or per_zone < 2):
            kind = "avoid"
        ww = int(rng.integers(side_lo, side_hi + 1))
        hh = int(rng.integers(side_lo, side_hi + 1))
        if kind == "road":
            if rng.random() < 0.5:
                ww, hh = max(2, max(ww, hh) * 2), 1
            else:
                ww, hh = 1, max(2, max(ww, hh) * 2)
        ww, hh = min(ww, width), min(hh, height)
        x0 = int(rng.integers(0, width - ww + 1))
        y0 = int(rng.integers(0, height - hh + 1))
        rect = (x0, y0, x0 + ww - 1, y0 + hh - 1)
        cells = _rect_cells(rect, width, height) - blocked
        if not cells:
            continue
        if len(cells - covered) > gap + 0.8 * tol_cells:
            continue  # would overshoot the coverage target
        if kind == "road":
            # The band must hold an adjacent free pair along its axis, or the
            # compiled road would not yield both direction constraints.
            axis = (1, 0) if hh == 1 else (0, 1)
            has_pair = any(
                (c[0] + axis[0], c[1] + axis[1]) in cells for c in cells
            )
            if not has_pair:
                continue
            direction = ("E", "W")[int(rng.integers(2))] if hh == 1 else ("N", "S")[
                int(rng.integers(2))
            ]
            zones.append(
                GridZoneSpec(
                    "road", rect, weight_hi=float(rng.integers(10, 40)),
                    direction=direction,
                )
            )
            count += 2
        elif kind == "avoid":
            zones.append(GridZoneSpec("avoid", rect, weight_hi=float(rng.integers(20, 60))))
            count += 1
        else:
            zones.append(
                GridZoneSpec("speed_limit", rect, weight_hi=float(rng.integers(5, 25)))
            )
            count += 1
        covered |= cells

    corners = [(1, 1), (width - 2, height - 2), (width - 2, 1), (1, height - 2)]
    free_set = {
        (x, y) for x in range(width) for y in range(height) if (x, y) not in blocked
    }

    def nearest_free(cell):
        best = min(
            free_set,
            key=lambda c: (abs(c[0] - cell[0]) + abs(c[1] - cell[1]), c),
        )
        return best

    t0 = (nearest_free(corners[0]), nearest_free(corners[1]))
    t1 = (nearest_free(corners[2]), nearest_free(corners[3]))
    if t0[0] == t0[1] or t1[0] == t1[1]:
        return None
    return GridScenarioConfig(
        width=width,
        height=height,
        obstacles=obstacles,
        zones=zones,
        tasks=[t0, t1],
        name=name,
    )


def resolve_scenario(ref: str) -> Scenario:
    """A preset name, or a path to a scenario file."""
    if ref in _PRESET_PARAMS:
        return preset_scenario(ref)
    return load_scenario(ref)
