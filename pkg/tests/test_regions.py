from __future__ import annotations

import numpy as np
import pytest

from pathpref.errors import DegenerateHalfspaceError
from pathpref.graph import PathRecord, graph_from_edges, path_cost, TaskSpec
from pathpref.regions import (
    INSIDE_IJ,
    INSIDE_JI,
    MIXED,
    EquivalenceRegion,
    SideCache,
    classify_region,
    halfspace_from_pair,
    sample_regions,
    sample_weights,
)
from battery import random_instance
from oracles import regions_by_enumeration, side_of_region


class TestSampleRegions:
    def test_single_path_instance_has_one_region(self):
        g = graph_from_edges("one", [("s", "g", 3.0), ("g", "s", 3.0)])
        rs = sample_regions(g, [], TaskSpec("s", "g"), 50, seed=0)
        assert len(rs) == 1
        assert rs.regions[0].support_count == 52

    def test_two_route_threshold(self, two_route):
        rs = sample_regions(
            two_route.graph, two_route.constraints, two_route.tasks[0], 500, seed=3
        )
        assert len(rs) == 2
        by_path = {r.canonical_path.edge_ids: r for r in rs.regions}
        # Cost tie at w1 = 5 resolves to the faster route B, so B's region is
        # exactly {w1 <= 5}.
        assert by_path[(1,)].support.max() <= 5.0
        assert by_path[(0,)].support.min() > 5.0

    def test_m1_has_corners(self, two_route):
        rs = sample_regions(
            two_route.graph, two_route.constraints, two_route.tasks[0], 1, seed=0
        )
        assert rs.samples.shape == (3, 1)
        assert rs.samples[0, 0] == 10.0  # upper corner first
        assert rs.samples[1, 0] == 0.0
        assert sum(r.support_count for r in rs.regions) == 3

    def test_deterministic_given_seed(self, diamond):
        a = sample_regions(diamond.graph, diamond.constraints, diamond.tasks[0], 100, 9)
        b = sample_regions(diamond.graph, diamond.constraints, diamond.tasks[0], 100, 9)
        assert [r.canonical_path.edge_ids for r in a.regions] == [
            r.canonical_path.edge_ids for r in b.regions
        ]
        assert np.array_equal(a.samples, b.samples)

    def test_monotone_discovery_under_stream_extension(self, diamond):
        small = sample_regions(diamond.graph, diamond.constraints, diamond.tasks[0], 40, 5)
        big = sample_regions(diamond.graph, diamond.constraints, diamond.tasks[0], 200, 5)
        small_paths = [r.canonical_path.edge_ids for r in small.regions]
        big_paths = [r.canonical_path.edge_ids for r in big.regions]
        # The first 42 samples coincide, so discovery order is a prefix.
        assert big_paths[: len(small_paths)] == small_paths

    def test_support_maps_back_to_canonical_path(self, diamond):
        from pathpref.graph import Planner

        rs = sample_regions(diamond.graph, diamond.constraints, diamond.tasks[0], 60, 2)
        planner = Planner(diamond.graph, diamond.constraints)
        for region in rs.regions:
            for w in region.support:
                assert (
                    planner.solve(w, diamond.tasks[0]).edge_ids
                    == region.canonical_path.edge_ids
                )

    def test_region_partition_accounting(self, diamond):
        rs = sample_regions(diamond.graph, diamond.constraints, diamond.tasks[0], 77, 4)
        assert sum(r.support_count for r in rs.regions) == 77 + 2
        assert len({r.canonical_path.edge_ids for r in rs.regions}) == len(rs)

    def test_matches_enumeration_classification(self):
        for seed in range(6):
            scenario = random_instance(seed)
            rs = sample_regions(
                scenario.graph, scenario.constraints, scenario.tasks[0], 400, seed + 50
            )
            canonical, assignment = regions_by_enumeration(
                scenario.graph, scenario.constraints, scenario.tasks[0], rs.samples
            )
            assert canonical == [r.canonical_path.edge_ids for r in rs.regions]
            assert np.array_equal(assignment, rs.region_of_sample)


class TestSampleWeights:
    def test_prefix_stability(self):
        lo = np.array([0.0, 1.0])
        hi = np.array([5.0, 2.0])
        a = sample_weights(lo, hi, 10, seed=8)
        b = sample_weights(lo, hi, 25, seed=8)
        assert np.array_equal(a, b[:10])

    def test_within_box(self):
        lo = np.array([-2.0, 0.0])
        hi = np.array([0.0, 7.0])
        w = sample_weights(lo, hi, 300, seed=1)
        assert (w >= lo).all() and (w <= hi).all()


class TestHalfspace:
    def test_identical_phi_different_time(self):
        pi = PathRecord((0,), (1, 0), 4.0)
        pj = PathRecord((1,), (1, 0), 7.0)
        hs = halfspace_from_pair(pi, pj)
        assert hs.normal.tolist() == [0.0, 0.0]
        assert hs.offset == 3.0  # whole box prefers i

    def test_direct_arithmetic(self):
        pi = PathRecord((0,), (1, 0), 7.0)
        pj = PathRecord((1,), (0, 2), 4.0)
        hs = halfspace_from_pair(pi, pj)
        assert hs.normal.tolist() == [1.0, -2.0]
        assert hs.offset == -3.0

    def test_identical_pair_degenerate(self):
        p = PathRecord((0,), (1,), 4.0)
        with pytest.raises(DegenerateHalfspaceError):
            halfspace_from_pair(p, p)


class TestClassifyRegion:
    def _region(self, rows):
        return EquivalenceRegion(0, PathRecord((0,), (0, 0), 1.0), np.array(rows))

    def test_all_inside(self):
        hs = halfspace_from_pair(
            PathRecord((0,), (1, 0), 1.0), PathRecord((1,), (0, 0), 5.0)
        )  # normal (1,0), offset 4
        region = self._region([[1.0, 0.0], [3.0, 2.0]])
        assert classify_region(region, hs) == INSIDE_IJ

    def test_half_inside_is_mixed(self):
        hs = halfspace_from_pair(
            PathRecord((0,), (1, 0), 1.0), PathRecord((1,), (0, 0), 5.0)
        )
        region = self._region([[1.0, 0.0], [9.0, 2.0]])
        assert classify_region(region, hs) == MIXED

    def test_boundary_counts_as_satisfying(self):
        hs = halfspace_from_pair(
            PathRecord((0,), (1, 0), 1.0), PathRecord((1,), (0, 0), 5.0)
        )
        region = self._region([[4.0, 0.0]])
        assert classify_region(region, hs) == INSIDE_IJ

    def test_none_inside(self):
        hs = halfspace_from_pair(
            PathRecord((0,), (1, 0), 1.0), PathRecord((1,), (0, 0), 5.0)
        )
        region = self._region([[6.0, 0.0], [9.0, 1.0]])
        assert classify_region(region, hs) == INSIDE_JI

    def test_inside_ij_implies_cheaper_everywhere(self, diamond):
        rs = sample_regions(diamond.graph, diamond.constraints, diamond.tasks[0], 200, 1)
        cache = SideCache(rs)
        for i in range(len(rs)):
            for j in range(len(rs)):
                if i == j:
                    continue
                sides = cache.sides(i, j)
                pi = rs.regions[i].canonical_path
                pj = rs.regions[j].canonical_path
                for rid, side in enumerate(sides):
                    if side == INSIDE_IJ:
                        for w in rs.regions[rid].support:
                            assert path_cost(pi, w) <= path_cost(pj, w)

    def test_side_cache_matches_scalar_classifier(self, three_region):
        rs = sample_regions(
            three_region.graph, three_region.constraints, three_region.tasks[0], 300, 2
        )
        cache = SideCache(rs)
        for i in range(len(rs)):
            for j in range(len(rs)):
                if i == j:
                    continue
                hs = cache.halfspace(i, j)
                sides = cache.sides(i, j)
                for region in rs.regions:
                    assert sides[region.region_id] == classify_region(region, hs)
                    assert sides[region.region_id] == side_of_region(
                        region.support, hs.normal, hs.offset
                    )
