"""Simulated feedback generators and rationality-coefficient calibration.

Two user models: a constant-accuracy responder (correct side with fixed
probability p, fair coin on exact cost ties) and a logistic responder whose
error rate shrinks with the cost difference, scaled by beta.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CalibrationError
from .graph import PathRecord, path_cost
from .regions import RegionSet
from .selectors import sigmoid

MERR_CONSTANT = "merr_constant"
MVR_LOGISTIC = "mvr_logistic"


@dataclass
class SimulatedUser:
    model: str
    true_weight: np.ndarray
    p: float | None = None
    beta: float | None = None
    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.model == MERR_CONSTANT:
            if self.p is None or not 0.5 < self.p <= 1.0:
                raise ValueError("constant-accuracy user needs p in (0.5, 1]")
        elif self.model == MVR_LOGISTIC:
            if self.beta is None or self.beta <= 0:
                raise ValueError("logistic user needs beta > 0")
        else:
            raise ValueError(f"unknown user model {self.model!r}")
        self.true_weight = np.asarray(self.true_weight, dtype=np.float64)
        self.rng = np.random.default_rng(self.seed)

    def respond(self, path_i: PathRecord, path_j: PathRecord) -> str:
        if self.model == MERR_CONSTANT:
            return merr_user_respond(path_i, path_j, self, self.rng)
        return mvr_user_respond(path_i, path_j, self, self.rng)


def merr_user_respond(
    path_i: PathRecord,
    path_j: PathRecord,
    user: SimulatedUser,
    rng: np.random.Generator,
) -> str:
    """Pick the truly cheaper path with probability p; coin-flip exact ties."""
    ci = path_cost(path_i, user.true_weight)
    cj = path_cost(path_j, user.true_weight)
    if ci == cj:
        return "i" if rng.random() < 0.5 else "j"
    better = "i" if ci < cj else "j"
    worse = "j" if better == "i" else "i"
    return better if rng.random() < user.p else worse


def mvr_user_respond(
    path_i: PathRecord,
    path_j: PathRecord,
    user: SimulatedUser,
    rng: np.random.Generator,
) -> str:
    """Pick path i with logistic probability in the true cost difference."""
    ci = path_cost(path_i, user.true_weight)
    cj = path_cost(path_j, user.true_weight)
    p_i = float(sigmoid(-user.beta * (ci - cj)))
    return "i" if rng.random() < p_i else "j"


def panel_accuracy(beta: float, cost_gaps: np.ndarray) -> float:
    """Expected accuracy of a logistic responder on a panel of |cost| gaps.

    A zero-gap pair contributes 1/2 (either answer is equally 'correct').
    """
    return float(np.mean(sigmoid(beta * cost_gaps)))


def sample_pair_panel(
    region_set: RegionSet,
    true_weight: np.ndarray,
    panel_size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Absolute true-cost gaps of randomly drawn distinct canonical-path pairs."""
    n = len(region_set)
    if n < 2:
        raise CalibrationError("need at least two regions to build a query panel")
    costs = region_set.feature_matrix @ np.asarray(true_weight) + region_set.time_vector
    a = rng.integers(0, n, size=panel_size)
    b = rng.integers(0, n - 1, size=panel_size)
    b = np.where(b >= a, b + 1, b)
    return np.abs(costs[a] - costs[b])


def calibrate_beta(
    region_set: RegionSet,
    true_weight: np.ndarray,
    target_accuracy: float,
    tolerance: float = 0.01,
    seed: int = 0,
    panel_size: int = 200,
) -> float:
    """Bisect beta until the panel's expected accuracy hits the target.

    Accuracy is monotone nondecreasing in beta, 1/2 at beta = 0 and bounded
    by the fraction of pairs with distinct costs, so the search either
    converges or the target is provably unreachable.
    """
    if not 0.5 < target_accuracy < 1.0:
        raise ValueError("target accuracy must lie in (0.5, 1)")
    rng = np.random.default_rng(seed)
    gaps = sample_pair_panel(region_set, true_weight, panel_size, rng)
    nonzero = gaps[gaps > 0]
    if nonzero.size == 0:
        raise CalibrationError("degenerate panel: every pair has equal true cost")
    limit = 1.0 - 0.5 * (gaps.size - nonzero.size) / gaps.size
    if target_accuracy > limit - 1e-12:
        raise CalibrationError(
            f"target accuracy {target_accuracy} unreachable; panel limit {limit:.4f}"
        )
    lo = 0.0
    hi = 1.0 / float(np.median(nonzero))
    while panel_accuracy(hi, gaps) < target_accuracy:
        hi *= 2.0
        if hi > 1e15:
            raise CalibrationError("accuracy target unreachable at any finite beta")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        acc = panel_accuracy(mid, gaps)
        if abs(acc - target_accuracy) <= tolerance * 0.5:
            return mid
        if acc < target_accuracy:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
