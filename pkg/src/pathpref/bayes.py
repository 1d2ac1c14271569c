"""Discrete Bayesian posterior over equivalence regions.

Each pairwise comparison multiplies a region's unnormalized measure q by the
assumed accuracy, its complement, or one half, depending on which side of the
feedback halfspace the region lies. q is kept in log scale so hundreds of
observations never underflow; probabilities are the normalized measures.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .regions import INSIDE_IJ, INSIDE_JI, EquivalenceRegion, RegionSet, SideCache

_TINY = 5e-324  # smallest positive subnormal, used to clamp exported q


@dataclass(frozen=True)
class Observation:
    """One pairwise feedback: the user chose path i or path j."""

    path_i: int  # region/canonical-path id shown as side i
    path_j: int
    choice: str  # "i" or "j"
    accuracy: float  # assumed accuracy p_hat used by the learner
    iteration: int = 0

    def __post_init__(self):
        if self.choice not in ("i", "j"):
            raise ValueError(f"choice must be 'i' or 'j', got {self.choice!r}")
        if not 0.5 < self.accuracy <= 1.0:
            raise ValueError(f"assumed accuracy must lie in (0.5, 1], got {self.accuracy}")

    def to_dict(self) -> dict:
        return {
            "path_i": self.path_i,
            "path_j": self.path_j,
            "choice": self.choice,
            "accuracy": self.accuracy,
            "iteration": self.iteration,
        }


@dataclass
class PosteriorState:
    """Normalized probabilities plus the unnormalized measure per region."""

    region_set: RegionSet
    sides: SideCache
    prior: np.ndarray
    log_q: np.ndarray
    n_observations: int = 0

    @property
    def q(self) -> np.ndarray:
        """Unnormalized posterior measure, prior-anchored, clamped above zero
        where the true value underflowed but is mathematically positive."""
        out = np.exp(self.log_q)
        underflowed = (out == 0.0) & np.isfinite(self.log_q)
        out[underflowed] = _TINY
        return out

    @property
    def probabilities(self) -> np.ndarray:
        shift = np.max(self.log_q)
        if not np.isfinite(shift):
            # Every region contradicted under p_hat = 1; no evidence survives.
            return np.full_like(self.prior, 1.0 / len(self.prior))
        scaled = np.exp(self.log_q - shift)
        return scaled / scaled.sum()

    def scaled_q(self) -> tuple[np.ndarray, float]:
        """q times exp(-shift); safe for ratio arithmetic after long sessions."""
        shift = np.max(self.log_q)
        if not np.isfinite(shift):
            shift = 0.0
        return np.exp(self.log_q - shift), float(shift)

    def to_dict(self, top: int | None = None) -> dict:
        probs = self.probabilities
        qs = self.q
        order = np.argsort(-probs, kind="stable")
        if top is not None:
            order = order[:top]
        return {
            "n_observations": self.n_observations,
            "regions": [
                {
                    "region_id": int(r),
                    "probability": float(probs[r]),
                    "q": float(qs[r]),
                    "path_edge_ids": list(
                        self.region_set.regions[r].canonical_path.edge_ids
                    ),
                }
                for r in order
            ],
        }


def region_prior(region_set: RegionSet, mode: str = "uniform") -> np.ndarray:
    if mode == "uniform":
        return np.full(len(region_set), 1.0 / len(region_set))
    if mode == "support":
        counts = np.array([r.support_count for r in region_set.regions], dtype=np.float64)
        return counts / counts.sum()
    raise ValueError(f"unknown prior mode {mode!r}")


def initial_posterior(
    region_set: RegionSet,
    prior: str | np.ndarray = "uniform",
    sides: SideCache | None = None,
) -> PosteriorState:
    p = region_prior(region_set, prior) if isinstance(prior, str) else np.asarray(prior)
    return PosteriorState(
        region_set=region_set,
        sides=sides or SideCache(region_set),
        prior=p,
        log_q=np.log(p),
    )


def likelihood_vector(state: PosteriorState, obs: Observation) -> np.ndarray:
    """Per-region probability of the observed choice."""
    sides = state.sides.sides(obs.path_i, obs.path_j)
    p = obs.accuracy
    if obs.choice == "i":
        hi, lo = p, 1.0 - p
    else:
        hi, lo = 1.0 - p, p
    out = np.full(len(sides), 0.5)
    out[sides == INSIDE_IJ] = hi
    out[sides == INSIDE_JI] = lo
    return out


def region_likelihood(
    state: PosteriorState, obs: Observation, region: EquivalenceRegion | int
) -> float:
    rid = region.region_id if isinstance(region, EquivalenceRegion) else region
    return float(likelihood_vector(state, obs)[rid])


def update_posterior(state: PosteriorState, obs: Observation) -> PosteriorState:
    """Multiply q by the observation's likelihood; returns a new state."""
    lik = likelihood_vector(state, obs)
    with np.errstate(divide="ignore"):
        log_lik = np.log(lik)
    return replace(
        state,
        log_q=state.log_q + log_lik,
        n_observations=state.n_observations + 1,
    )


def apply_observations(
    state: PosteriorState, observations: Iterable[Observation]
) -> PosteriorState:
    for obs in observations:
        state = update_posterior(state, obs)
    return state


def total_measure_deficit(state: PosteriorState) -> float:
    """1 - sum(q): the greedy objective accumulated so far."""
    return 1.0 - float(np.sum(np.exp(state.log_q)))


def best_region(state: PosteriorState) -> tuple[EquivalenceRegion, np.ndarray]:
    """Maximum-posterior region (lowest id on ties) and its representative weight."""
    rid = int(np.argmax(state.probabilities))
    region = state.region_set.regions[rid]
    return region, region.representative_weight
