from __future__ import annotations

import math

import numpy as np
import pytest

from pathpref.bayes import apply_observations, initial_posterior
from pathpref.errors import BudgetExhaustedError, ProtocolError
from pathpref.graph import TaskSpec, graph_from_edges, violation_vector
from pathpref.regions import SideCache, sample_regions
from pathpref.scenarios import (
    GridScenarioConfig,
    GridZoneSpec,
    build_grid_scenario,
)
from pathpref.session import (
    SessionConfig,
    init_session,
    run_session,
    session_result,
    step,
)
from pathpref.users import MERR_CONSTANT, SimulatedUser
from battery import standard_battery


def _user(scenario, p=0.9, w=None, seed=0):
    if w is None:
        from pathpref.graph import weight_box

        lo, hi = weight_box(scenario.constraints)
        w = (lo + hi) / 2
    return SimulatedUser(MERR_CONSTANT, np.asarray(w, dtype=float), p=p, seed=seed)


class TestInitSession:
    def test_one_region_converges_by_vacuity(self):
        g = graph_from_edges("one", [("s", "g", 3.0), ("g", "s", 3.0)])
        from pathpref.scenarios import Scenario

        scenario = Scenario("one", g, [], [TaskSpec("s", "g")])
        state = init_session(scenario, SessionConfig(sample_count=20), seed=0)
        assert state.converged_by_vacuity
        assert state.pending is None
        assert state.current_region == 0

    def test_initial_path_respects_avoid_zone_when_detour_exists(self):
        # A wall of avoidance across the middle with a gap-free detour: at the
        # upper weight corner the initial path must not violate the zone.
        cfg = GridScenarioConfig(
            width=5,
            height=5,
            zones=[GridZoneSpec("avoid", (1, 2, 3, 2), weight_hi=50.0)],
            tasks=[((2, 0), (2, 4))],
            name="wall",
        )
        scenario = build_grid_scenario(cfg)
        state = init_session(scenario, SessionConfig(sample_count=100), seed=1)
        initial = state.path_of(state.current_region)
        assert initial.violations[0] == 0
        # Enumeration confirms a violating shortcut exists and is faster.
        from pathpref.graph import Planner

        planner = Planner(scenario.graph, scenario.constraints)
        shortcut = planner.solve(np.zeros(len(scenario.constraints)), scenario.tasks[0])
        assert shortcut.violations[0] > 0
        assert shortcut.total_time < initial.total_time

    def test_same_seed_identical_state(self, diamond):
        a = init_session(diamond, SessionConfig(sample_count=150), seed=7)
        b = init_session(diamond, SessionConfig(sample_count=150), seed=7)
        assert np.array_equal(a.region_set.samples, b.region_set.samples)
        assert a.current_region == b.current_region
        assert (a.pending.current, a.pending.proposed) == (
            b.pending.current,
            b.pending.proposed,
        )

    def test_current_is_upper_corner_region(self, two_route):
        state = init_session(two_route, SessionConfig(sample_count=100), seed=0)
        # Upper corner w=10 makes the clean route optimal.
        assert state.path_of(state.current_region).edge_ids == (0,)


class TestStep:
    def test_prefer_current_keeps_region_updates_posterior(self, two_route):
        state = init_session(two_route, SessionConfig(sample_count=200), seed=0)
        before_region = state.current_region
        before_probs = state.posterior.probabilities.copy()
        step(state, "current")
        assert state.current_region == before_region
        assert not np.allclose(state.posterior.probabilities, before_probs)

    def test_prefer_new_promotes(self, two_route):
        state = init_session(two_route, SessionConfig(sample_count=200), seed=0)
        proposed = state.pending.proposed
        step(state, "new")
        assert state.current_region == proposed

    def test_budget_exhaustion_refuses_feedback(self, two_route):
        state = init_session(
            two_route, SessionConfig(budget=1, sample_count=100), seed=0
        )
        step(state, "current")
        assert state.pending is None
        with pytest.raises(BudgetExhaustedError, match="budget exhausted"):
            step(state, "current")

    def test_feedback_without_pending_query(self):
        g = graph_from_edges("one", [("s", "g", 3.0), ("g", "s", 3.0)])
        from pathpref.scenarios import Scenario

        scenario = Scenario("one", g, [], [TaskSpec("s", "g")])
        state = init_session(scenario, SessionConfig(sample_count=20, budget=5), seed=0)
        with pytest.raises(ProtocolError):
            step(state, "current")

    def test_pending_pair_always_contains_current(self, three_region):
        state = init_session(three_region, SessionConfig(sample_count=300, budget=10), seed=3)
        rng = np.random.default_rng(0)
        while state.pending is not None:
            assert state.pending.current == state.current_region
            step(state, "new" if rng.random() < 0.5 else "current")

    def test_informative_counts_track_decisive_sides(self, three_region):
        state = init_session(three_region, SessionConfig(sample_count=300, budget=3), seed=3)
        while state.pending is not None:
            step(state, "current")
        total = np.zeros(len(state.region_set), dtype=int)
        for obs in state.observations:
            sides = state.posterior.sides.sides(obs.path_i, obs.path_j)
            total += (sides != 0).astype(int)
        assert np.array_equal(total, state.informative_counts)


class TestRunSession:
    def test_two_region_p1_one_query(self, two_route):
        user = SimulatedUser(MERR_CONSTANT, np.array([2.0]), p=1.0, seed=0)
        cfg = SessionConfig(p_hat=1.0, budget=1, sample_count=300)
        result = run_session(two_route, user, cfg, seed=0)
        assert result.true_region_id is not None
        assert result.posterior_true[-1] == 1.0
        assert result.iterations == 1

    def test_zero_budget_returns_prior_argmax(self, two_route):
        user = _user(two_route, w=[2.0])
        cfg = SessionConfig(budget=0, sample_count=200)
        result = run_session(two_route, user, cfg, seed=0)
        assert result.trajectory.shape[0] == 1
        assert result.best_region_id == 0  # uniform prior tie -> lowest id

    def test_trajectory_length_is_iterations_plus_one(self, diamond):
        user = _user(diamond, p=0.85)
        cfg = SessionConfig(budget=7, sample_count=200)
        result = run_session(diamond, user, cfg, seed=1)
        assert result.trajectory.shape[0] == result.iterations + 1 == 8

    def test_replay_reproduces_final_posterior(self, diamond):
        user = _user(diamond, p=0.8, seed=4)
        cfg = SessionConfig(budget=15, sample_count=250)
        result = run_session(diamond, user, cfg, seed=9)
        rs = sample_regions(
            diamond.graph, diamond.constraints, diamond.tasks[0],
            cfg.sample_count,
            # same region seed derivation as init_session
            int(np.random.SeedSequence(9).spawn(2)[0].generate_state(1)[0]),
        )
        state = initial_posterior(rs, sides=SideCache(rs))
        state = apply_observations(state, result.observations)
        assert np.array_equal(state.probabilities, result.trajectory[-1])

    def test_p_hat_one_contradicted_regions_stay_zero(self, three_region):
        user = SimulatedUser(
            MERR_CONSTANT, np.array([1.0, 9.0]), p=1.0, seed=2
        )
        cfg = SessionConfig(p_hat=1.0, budget=20, sample_count=400)
        result = run_session(three_region, user, cfg, seed=2)
        zeroed = set()
        for it in range(result.trajectory.shape[0]):
            now_zero = {r for r in range(result.trajectory.shape[1])
                        if result.trajectory[it, r] == 0.0}
            assert zeroed <= now_zero  # never resurrects
            zeroed = now_zero

    def test_early_stop_threshold(self, two_route):
        user = SimulatedUser(MERR_CONSTANT, np.array([2.0]), p=1.0, seed=0)
        cfg = SessionConfig(p_hat=0.95, budget=50, sample_count=200, early_stop=0.9)
        result = run_session(two_route, user, cfg, seed=0)
        assert result.early_stopped
        assert result.iterations < 50

    def test_session_result_csv_rows(self, two_route):
        user = _user(two_route, w=[2.0])
        cfg = SessionConfig(budget=2, sample_count=100)
        result = run_session(two_route, user, cfg, seed=0)
        rows = result.to_csv_rows()
        assert len(rows) == (result.iterations + 1) * result.trajectory.shape[1]
        assert {r["iteration"] for r in rows} == set(range(result.iterations + 1))


class TestConvergenceStatistics:
    def test_median_posterior_rises_n20_to_n200(self):
        """One-sided sign test at the 1% level on the small-instance battery."""
        battery = standard_battery(n_instances=4, sample_count=600)
        cfg = SessionConfig(p_hat=0.9, budget=200, sample_count=600)
        improvements = 0
        ties = 0
        trials = 0
        rng = np.random.default_rng(0)
        for scenario, rs in battery:
            lo = rs.box_lo
            hi = rs.box_hi
            for t in range(10):
                w = lo + rng.random(len(lo)) * (hi - lo)
                user = SimulatedUser(
                    MERR_CONSTANT, np.asarray(w), p=0.9, seed=1000 + t
                )
                result = run_session(scenario, user, cfg, seed=2000 + t, region_set=rs)
                if result.posterior_true is None:
                    continue
                p20 = result.posterior_true[min(20, len(result.posterior_true) - 1)]
                p200 = result.posterior_true[-1]
                trials += 1
                if p200 > p20:
                    improvements += 1
                elif p200 == p20:
                    ties += 1
        n_eff = trials - ties
        # Binomial tail P(X >= improvements | p=1/2): must reject at 1%.
        tail = sum(
            math.comb(n_eff, k) for k in range(improvements, n_eff + 1)
        ) / 2**n_eff
        assert tail < 0.01, (improvements, n_eff, tail)
