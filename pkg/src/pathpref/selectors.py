"""Query selection: which alternative path to show next to the user.

Every query keeps the currently accepted path as one side, so the user is
never asked to abandon a path they have not compared against. Three
strategies ship: the greedy measure-removal selector (the learner's own
objective), a volume-removal baseline over the continuous weight box with a
logistic response model, and a uniform-random control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bayes import PosteriorState
from .regions import INSIDE_IJ, INSIDE_JI, RegionSet


@dataclass(frozen=True)
class QueryPair:
    current: int  # region/canonical-path id of the accepted path
    proposed: int
    selector: str
    objective: float


@dataclass
class MvrConfig:
    """State of the volume-removal baseline.

    beta is the rationality coefficient (1/seconds) of the logistic response
    model; masses sit on the same weight samples used to build the region set
    and shrink multiplicatively as feedback arrives.
    """

    beta: float
    masses: np.ndarray

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not (self.masses > 0).all():
            raise ValueError("masses must be positive")


def make_mvr_config(region_set: RegionSet, beta: float) -> MvrConfig:
    n = region_set.samples.shape[0]
    return MvrConfig(beta=beta, masses=np.full(n, 1.0 / n))


def sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500.0, 500.0)))


def choice_probability(beta: float, cost_chosen, cost_other):
    """Logistic probability of picking the first path of a pair."""
    return sigmoid(-beta * (np.asarray(cost_chosen) - np.asarray(cost_other)))


def merr_select(
    state: PosteriorState, current_region: int, p_hat: float
) -> QueryPair | None:
    """Greedy proposal minimizing the expected post-feedback measure sum.

    For each candidate region j != current, the predicted response
    probabilities are the posterior-weighted likelihoods, and the score is
    the expectation of sum(q) after the update. Ties go to the lowest region
    id. Returns None when only one region exists.
    """
    n = len(state.region_set)
    if n < 2:
        return None
    q, shift = state.scaled_q()
    total = float(q.sum())
    best_j = -1
    best_score = math.inf
    for j in range(n):
        if j == current_region:
            continue
        sides = state.sides.sides(current_region, j)
        lik_i = np.full(n, 0.5)
        lik_i[sides == INSIDE_IJ] = p_hat
        lik_i[sides == INSIDE_JI] = 1.0 - p_hat
        a_i = float(lik_i @ q)
        a_j = total - a_i
        score = (a_i * a_i + a_j * a_j) / total
        if score < best_score:
            best_score = score
            best_j = j
    return QueryPair(
        current=current_region,
        proposed=best_j,
        selector="merr",
        objective=best_score * math.exp(shift),
    )


def expected_pair_gain(state: PosteriorState, i: int, j: int, p_hat: float) -> float:
    """Expected decrease of sum(q) from asking the pair (i, j) now.

    The unfixed-pair form of the greedy objective's marginal reward, exposed
    for the diminishing-returns property checks.
    """
    sides = state.sides.sides(i, j)
    q = np.exp(state.log_q)
    total = float(q.sum())
    lik_i = np.full(len(q), 0.5)
    lik_i[sides == INSIDE_IJ] = p_hat
    lik_i[sides == INSIDE_JI] = 1.0 - p_hat
    gain = 0.0
    for lik in (lik_i, 1.0 - lik_i):
        a = float(lik @ q)
        gain += (a / total) * (total - a)
    return gain


def mvr_select(
    mvr: MvrConfig, region_set: RegionSet, current_region: int
) -> QueryPair | None:
    """Baseline: maximize the expected probability mass removed from the box.

    The response model is logistic in the cost difference with coefficient
    beta; candidate j's score is the response-probability-weighted mass that
    the feedback would multiply away. Ties go to the lowest region id.
    """
    n = len(region_set)
    if n < 2:
        return None
    costs = region_set.cost_matrix
    masses = mvr.masses
    total = float(masses.sum())
    cost_curr = costs[current_region]
    best_j = -1
    best_score = -math.inf
    for j in range(n):
        if j == current_region:
            continue
        f_curr = sigmoid(-mvr.beta * (cost_curr - costs[j]))
        a = float(masses @ f_curr)
        score = 2.0 * a * (total - a) / total
        if score > best_score:
            best_score = score
            best_j = j
    return QueryPair(
        current=current_region, proposed=best_j, selector="mvr", objective=best_score
    )


def mvr_update_masses(
    mvr: MvrConfig, region_set: RegionSet, pair: QueryPair, chose_current: bool
) -> None:
    """Multiply each sample's mass by the chosen side's response probability."""
    costs = region_set.cost_matrix
    diff = costs[pair.current] - costs[pair.proposed]
    f_curr = sigmoid(-mvr.beta * diff)
    mvr.masses = mvr.masses * (f_curr if chose_current else 1.0 - f_curr)


def random_select(
    region_set: RegionSet, current_region: int, rng: np.random.Generator
) -> QueryPair | None:
    """Uniform over candidate regions; the control baseline."""
    n = len(region_set)
    if n < 2:
        return None
    candidates = [j for j in range(n) if j != current_region]
    j = candidates[int(rng.integers(len(candidates)))]
    return QueryPair(
        current=current_region, proposed=j, selector="random", objective=float("nan")
    )
