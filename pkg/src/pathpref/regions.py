"""Equivalence regions of the weight box, built by sampling the planner.

Two weight vectors are equivalent when the planner returns the same path for
both. Regions are discovered by drawing weights uniformly from the box,
planning once per draw, and grouping draws by the resulting edge sequence.
Membership of a region in a feedback halfspace is tested on its support
samples; the test sharpens as the sample count grows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateHalfspaceError
from .graph import (
    Constraint,
    EnvironmentGraph,
    PathRecord,
    Planner,
    TaskSpec,
    snap_array,
    weight_box,
)

INSIDE_IJ = 1
INSIDE_JI = -1
MIXED = 0

_CHUNK = 256  # samples planned per cost-matrix block


@dataclass(frozen=True)
class Halfspace:
    """Weights for which path i costs no more than path j."""

    normal: np.ndarray  # phi_i - phi_j
    offset: float  # t_j - t_i
    source: tuple[int, int] | None = None


def halfspace_from_pair(path_i: PathRecord, path_j: PathRecord,
                        source: tuple[int, int] | None = None) -> Halfspace:
    normal = path_i.violations_array - path_j.violations_array
    offset = path_j.total_time - path_i.total_time
    if not normal.any() and offset == 0.0:
        raise DegenerateHalfspaceError(
            "paths share features and time; the comparison carries no information"
        )
    return Halfspace(normal, offset, source)


@dataclass
class EquivalenceRegion:
    region_id: int
    canonical_path: PathRecord
    support: np.ndarray  # (support_count, d) weight samples

    @property
    def representative_weight(self) -> np.ndarray:
        return self.support[0]

    @property
    def support_count(self) -> int:
        return int(self.support.shape[0])


@dataclass
class RegionSet:
    """All regions discovered from one sampling run, in discovery order."""

    regions: list[EquivalenceRegion]
    samples: np.ndarray  # (S, d) every planned weight draw, corners first
    region_of_sample: np.ndarray  # (S,) region id per draw
    sample_count: int  # requested M (samples carries M + 2 corner rows)
    seed: int
    box_lo: np.ndarray
    box_hi: np.ndarray
    graph: EnvironmentGraph
    constraints: list[Constraint]
    task: TaskSpec
    _by_edge_ids: dict[tuple[int, ...], int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._by_edge_ids:
            self._by_edge_ids = {
                r.canonical_path.edge_ids: r.region_id for r in self.regions
            }

    def __len__(self) -> int:
        return len(self.regions)

    def region_of_path(self, edge_ids: tuple[int, ...]) -> int | None:
        return self._by_edge_ids.get(tuple(edge_ids))

    @cached_property
    def feature_matrix(self) -> np.ndarray:
        """(R, d) violation vectors of the canonical paths."""
        return np.stack([r.canonical_path.violations_array for r in self.regions])

    @cached_property
    def time_vector(self) -> np.ndarray:
        return np.array(
            [r.canonical_path.total_time for r in self.regions], dtype=np.float64
        )

    @cached_property
    def cost_matrix(self) -> np.ndarray:
        """(R, S) canonical-path costs at every drawn sample."""
        return self.feature_matrix @ self.samples.T + self.time_vector[:, None]

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "seed": self.seed,
            "box_lo": self.box_lo.tolist(),
            "box_hi": self.box_hi.tolist(),
            "regions": [
                {
                    "region_id": r.region_id,
                    "edge_ids": list(r.canonical_path.edge_ids),
                    "violations": list(r.canonical_path.violations),
                    "total_time": r.canonical_path.total_time,
                    "support_count": r.support_count,
                    "representative_weight": r.representative_weight.tolist(),
                }
                for r in self.regions
            ],
        }


def sample_weights(
    lo: np.ndarray, hi: np.ndarray, count: int, seed: int
) -> np.ndarray:
    """Uniform draws from the box, snapped to the planner's binary grid.

    The stream is prefix-stable: the first k rows for count=M equal the first
    k rows for any count >= M under the same seed.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random((count, len(lo)))
    w = snap_array(lo + u * (hi - lo))
    return np.clip(w, lo, hi)


def sample_regions(
    graph: EnvironmentGraph,
    constraints: Sequence[Constraint],
    task: TaskSpec,
    sample_count: int,
    seed: int,
    planner: Planner | None = None,
) -> RegionSet:
    """Plan at M uniform draws plus the two box corners and group by path.

    Region ids follow first appearance; the all-upper-bound corner is sample 0,
    so the most constraint-respecting path always owns region 0.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    planner = planner or Planner(graph, constraints)
    lo, hi = weight_box(constraints)
    lo = snap_array(lo)
    hi = snap_array(hi)
    draws = sample_weights(lo, hi, sample_count, seed)
    samples = np.vstack([hi[None, :], lo[None, :], draws])
    total = samples.shape[0]

    region_of_sample = np.empty(total, dtype=np.int64)
    order: dict[tuple[int, ...], int] = {}
    paths: list[PathRecord] = []
    support: list[list[int]] = []
    for base in range(0, total, _CHUNK):
        block = samples[base : base + _CHUNK]
        costs = planner.times + block @ planner.membership
        planner._check_nonnegative(costs.min(axis=0))
        for i in range(block.shape[0]):
            rec = planner.solve_with_costs(costs[i], task)
            rid = order.get(rec.edge_ids)
            if rid is None:
                rid = len(paths)
                order[rec.edge_ids] = rid
                paths.append(rec)
                support.append([])
            support[rid].append(base + i)
            region_of_sample[base + i] = rid

    regions = [
        EquivalenceRegion(rid, paths[rid], samples[idx])
        for rid, idx in enumerate(support)
    ]
    return RegionSet(
        regions=regions,
        samples=samples,
        region_of_sample=region_of_sample,
        sample_count=sample_count,
        seed=seed,
        box_lo=lo,
        box_hi=hi,
        graph=graph,
        constraints=list(constraints),
        task=task,
    )


def classify_region(region: EquivalenceRegion, halfspace: Halfspace) -> int:
    """Side of a region w.r.t. a halfspace, judged on its support samples.

    INSIDE_IJ when every sample satisfies normal.w <= offset (boundary counts
    as satisfying), INSIDE_JI when none does, MIXED otherwise.
    """
    sat = region.support @ halfspace.normal <= halfspace.offset
    if sat.all():
        return INSIDE_IJ
    if not sat.any():
        return INSIDE_JI
    return MIXED


class SideCache:
    """Vectorized region-vs-halfspace classification for canonical-path pairs.

    ``sides(i, j)`` returns an int8 array over regions: +1 where the region
    lies inside the halfspace favoring path i, -1 where it favors path j,
    0 where its support straddles the boundary. Results are cached; the cache
    is shared by every consumer of the same region set.
    """

    def __init__(self, region_set: RegionSet):
        self.region_set = region_set
        self._cache: dict[tuple[int, int], np.ndarray] = {}
        rids = region_set.region_of_sample
        self._n_regions = len(region_set)
        self._support_sizes = np.bincount(rids, minlength=self._n_regions)

    def halfspace(self, i: int, j: int) -> Halfspace:
        regions = self.region_set.regions
        return halfspace_from_pair(
            regions[i].canonical_path, regions[j].canonical_path, source=(i, j)
        )

    def sides(self, i: int, j: int) -> np.ndarray:
        key = (i, j)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        hs = self.halfspace(i, j)
        rs = self.region_set
        sat = (rs.samples @ hs.normal <= hs.offset).astype(np.float64)
        inside = np.bincount(rs.region_of_sample, weights=sat, minlength=self._n_regions)
        sides = np.zeros(self._n_regions, dtype=np.int8)
        sides[inside == self._support_sizes] = INSIDE_IJ
        sides[inside == 0] = INSIDE_JI
        self._cache[key] = sides
        return sides
