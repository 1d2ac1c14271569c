"""The interactive learning loop: queries, feedback, posterior, promotion.

A session starts from the most constraint-respecting path (planned at the
box's upper corner), repeatedly shows the user the current path against a
selected alternative, updates the region posterior from each answer, and
promotes the alternative to current whenever the user prefers it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bayes
from .bayes import Observation, PosteriorState
from .errors import BudgetExhaustedError, ProtocolError
from .graph import PathRecord, Planner
from .regions import RegionSet, SideCache, sample_regions
from .selectors import (
    MvrConfig,
    QueryPair,
    make_mvr_config,
    merr_select,
    mvr_select,
    mvr_update_masses,
    random_select,
)
from .users import SimulatedUser

CHOICE_CURRENT = "current"
CHOICE_NEW = "new"


@dataclass
class SessionConfig:
    selector: str = "merr"
    p_hat: float = 0.9
    budget: int = 30
    sample_count: int = 2000
    prior: str = "uniform"
    beta: float | None = None  # mvr selector only
    early_stop: float | None = None  # stop once max posterior reaches this
    task_index: int = 0
    region_seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "selector": self.selector,
            "p_hat": self.p_hat,
            "budget": self.budget,
            "sample_count": self.sample_count,
            "prior": self.prior,
            "beta": self.beta,
            "early_stop": self.early_stop,
            "task_index": self.task_index,
            "region_seed": self.region_seed,
        }


@dataclass
class SessionState:
    scenario: "Scenario"
    config: SessionConfig
    seed: int
    region_set: RegionSet
    posterior: PosteriorState
    current_region: int
    pending: QueryPair | None
    budget: int
    n: int = 0
    observations: list[Observation] = field(default_factory=list)
    informative_counts: np.ndarray | None = None  # decisive-feedback count per region
    trajectory: list[np.ndarray] = field(default_factory=list)
    current_history: list[int] = field(default_factory=list)
    mvr: MvrConfig | None = None
    selector_rng: np.random.Generator | None = None
    converged_by_vacuity: bool = False
    exhausted_candidates: bool = False
    early_stopped: bool = False

    @property
    def finished(self) -> bool:
        return self.pending is None

    def path_of(self, region_id: int) -> PathRecord:
        return self.region_set.regions[region_id].canonical_path


@dataclass
class SessionResult:
    best_region_id: int
    best_weight: np.ndarray
    trajectory: np.ndarray  # (iterations + 1, regions) posterior per region
    current_history: list[int]
    observations: list[Observation]
    true_region_id: int | None
    posterior_true: np.ndarray | None
    iterations_to_half: int | None
    iterations_to_ninety: int | None
    seed: int
    config: dict
    converged_by_vacuity: bool = False
    exhausted_candidates: bool = False
    early_stopped: bool = False

    @property
    def iterations(self) -> int:
        return self.trajectory.shape[0] - 1

    def to_dict(self) -> dict:
        return {
            "best_region_id": self.best_region_id,
            "best_weight": self.best_weight.tolist(),
            "true_region_id": self.true_region_id,
            "iterations": self.iterations,
            "iterations_to_half": self.iterations_to_half,
            "iterations_to_ninety": self.iterations_to_ninety,
            "seed": self.seed,
            "config": self.config,
            "converged_by_vacuity": self.converged_by_vacuity,
            "exhausted_candidates": self.exhausted_candidates,
            "early_stopped": self.early_stopped,
            "observations": [o.to_dict() for o in self.observations],
            "trajectory": self.trajectory.tolist(),
            "current_history": self.current_history,
        }

    def to_csv_rows(self) -> list[dict]:
        """Long-format trajectory rows: one per (iteration, region)."""
        rows = []
        for it in range(self.trajectory.shape[0]):
            current = self.current_history[it]
            for rid in range(self.trajectory.shape[1]):
                rows.append(
                    {
                        "seed": self.seed,
                        "iteration": it,
                        "region_id": rid,
                        "posterior": self.trajectory[it, rid],
                        "is_true_region": int(rid == self.true_region_id),
                        "current_path_id": current,
                    }
                )
        return rows


def _select(state: SessionState) -> QueryPair | None:
    cfg = state.config
    if cfg.selector == "merr":
        return merr_select(state.posterior, state.current_region, cfg.p_hat)
    if cfg.selector == "mvr":
        return mvr_select(state.mvr, state.region_set, state.current_region)
    if cfg.selector == "random":
        return random_select(state.region_set, state.current_region, state.selector_rng)
    raise ValueError(f"unknown selector {cfg.selector!r}")


def _next_query(state: SessionState) -> None:
    if state.n >= state.budget:
        state.pending = None
        return
    if (
        state.config.early_stop is not None
        and float(np.max(state.posterior.probabilities)) >= state.config.early_stop
    ):
        state.pending = None
        state.early_stopped = True
        return
    pair = _select(state)
    if pair is None:
        state.pending = None
        state.exhausted_candidates = True
    else:
        state.pending = pair


def init_session(
    scenario: "Scenario",
    config: SessionConfig,
    seed: int,
    region_set: RegionSet | None = None,
) -> SessionState:
    """Sample regions, set the prior, and plan the initial query.

    The current path starts as the planner output at the all-upper-bound
    weight (the most constraint-respecting path); that corner is always the
    first sample, so its region always exists. A prebuilt region set for the
    same scenario/task/sample_count may be injected to share work across
    sessions; it must have been built with matching parameters.
    """
    ss = np.random.SeedSequence(seed)
    region_child, selector_child = ss.spawn(2)
    if region_set is None:
        region_seed = (
            config.region_seed
            if config.region_seed is not None
            else int(region_child.generate_state(1)[0])
        )
        region_set = sample_regions(
            scenario.graph,
            scenario.constraints,
            scenario.tasks[config.task_index],
            config.sample_count,
            region_seed,
        )
    sides = SideCache(region_set)
    posterior = bayes.initial_posterior(region_set, config.prior, sides)
    state = SessionState(
        scenario=scenario,
        config=config,
        seed=seed,
        region_set=region_set,
        posterior=posterior,
        current_region=int(region_set.region_of_sample[0]),
        pending=None,
        budget=config.budget,
        informative_counts=np.zeros(len(region_set), dtype=np.int64),
        selector_rng=np.random.default_rng(selector_child),
    )
    if config.selector == "mvr":
        if config.beta is None:
            raise ValueError("mvr selector requires config.beta")
        state.mvr = make_mvr_config(region_set, config.beta)
    state.trajectory.append(posterior.probabilities)
    state.current_history.append(state.current_region)
    if len(region_set) < 2:
        state.converged_by_vacuity = True
        state.pending = None
        return state
    _next_query(state)
    return state


def step(state: SessionState, feedback: str) -> SessionState:
    """Apply one user answer to the pending query; schedules the next one."""
    if state.pending is None:
        if state.n >= state.budget:
            raise BudgetExhaustedError("budget exhausted")
        raise ProtocolError("no pending query to answer")
    if feedback not in (CHOICE_CURRENT, CHOICE_NEW):
        raise ValueError(f"feedback must be 'current' or 'new', got {feedback!r}")
    pair = state.pending
    obs = Observation(
        path_i=pair.current,
        path_j=pair.proposed,
        choice="i" if feedback == CHOICE_CURRENT else "j",
        accuracy=state.config.p_hat,
        iteration=state.n + 1,
    )
    state.posterior = bayes.update_posterior(state.posterior, obs)
    state.observations.append(obs)
    sides = state.posterior.sides.sides(obs.path_i, obs.path_j)
    state.informative_counts += (sides != 0).astype(np.int64)
    if state.mvr is not None:
        mvr_update_masses(
            state.mvr, state.region_set, pair, chose_current=feedback == CHOICE_CURRENT
        )
    if feedback == CHOICE_NEW:
        state.current_region = pair.proposed
    state.n += 1
    state.trajectory.append(state.posterior.probabilities)
    state.current_history.append(state.current_region)
    state.pending = None
    _next_query(state)
    return state


def _iterations_to(posterior_true: np.ndarray, threshold: float) -> int | None:
    hits = np.nonzero(posterior_true >= threshold)[0]
    return int(hits[0]) if hits.size else None


def session_result(state: SessionState, true_weight: np.ndarray | None = None) -> SessionResult:
    region, weight = bayes.best_region(state.posterior)
    trajectory = np.stack(state.trajectory)
    true_region_id = None
    posterior_true = None
    it_half = it_ninety = None
    if true_weight is not None:
        planner = Planner(state.scenario.graph, state.scenario.constraints)
        task = state.scenario.tasks[state.config.task_index]
        true_path = planner.solve(np.asarray(true_weight), task)
        true_region_id = state.region_set.region_of_path(true_path.edge_ids)
        if true_region_id is not None:
            posterior_true = trajectory[:, true_region_id]
        else:
            posterior_true = np.zeros(trajectory.shape[0])
        it_half = _iterations_to(posterior_true, 0.5)
        it_ninety = _iterations_to(posterior_true, 0.9)
    return SessionResult(
        best_region_id=region.region_id,
        best_weight=weight,
        trajectory=trajectory,
        current_history=list(state.current_history),
        observations=list(state.observations),
        true_region_id=true_region_id,
        posterior_true=posterior_true,
        iterations_to_half=it_half,
        iterations_to_ninety=it_ninety,
        seed=state.seed,
        config=state.config.to_dict(),
        converged_by_vacuity=state.converged_by_vacuity,
        exhausted_candidates=state.exhausted_candidates,
        early_stopped=state.early_stopped,
    )


def run_session(
    scenario: "Scenario",
    user: SimulatedUser,
    config: SessionConfig,
    seed: int,
    region_set: RegionSet | None = None,
) -> SessionResult:
    """Full simulated loop: init, answer every pending query, summarize."""
    state = init_session(scenario, config, seed, region_set=region_set)
    while state.pending is not None:
        pair = state.pending
        choice = user.respond(state.path_of(pair.current), state.path_of(pair.proposed))
        step(state, CHOICE_CURRENT if choice == "i" else CHOICE_NEW)
    return session_result(state, true_weight=user.true_weight)
