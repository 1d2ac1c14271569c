"""Batch experiment runner and summarizer.

A batch expands a grid of (scenario, user, selector, assumed-accuracy) cells,
runs seeded trials in each, and writes one CSV row per trial iteration.
Per-trial seeds derive from the master seed by a fixed counter scheme
(``SeedSequence((master, cell_index, trial_index))``), so any rerun of the
same config is byte-identical apart from the timestamp header line.
"""
from __future__ import annotations

import csv
import io
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from statistics import median
from typing import Sequence

import numpy as np

from .graph import snap_array, weight_box
from .regions import RegionSet, sample_regions
from .scenarios import Scenario, resolve_scenario
from .session import SessionConfig, run_session
from .users import MERR_CONSTANT, MVR_LOGISTIC, SimulatedUser, calibrate_beta

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "schema_version",
    "scenario",
    "cell",
    "trial",
    "selector",
    "user_model",
    "user_p",
    "user_beta",
    "p_hat",
    "seed",
    "iteration",
    "true_region_id",
    "posterior_true",
    "posterior_max",
    "current_region_id",
    "current_is_true",
    "iters_to_50",
    "iters_to_90",
    "error",
]


@dataclass(frozen=True)
class UserGridSpec:
    model: str  # merr_constant | mvr_logistic
    p: float | None = None
    beta: float | None = None
    target_accuracy: float | None = None  # calibrate beta per trial
    calibration_tolerance: float = 0.01

    def label(self) -> str:
        if self.model == MERR_CONSTANT:
            return f"merr(p={self.p})"
        if self.beta is not None:
            return f"mvr(beta={self.beta})"
        return f"mvr(acc={self.target_accuracy})"


@dataclass(frozen=True)
class PhatSpec:
    """How the learner's assumed accuracy relates to the simulated user."""

    mode: str = "match"  # match | offset | fixed
    value: float = 0.0

    def resolve(self, user: UserGridSpec) -> float:
        if self.mode == "fixed":
            return self.value
        if user.model == MVR_LOGISTIC:
            base = user.target_accuracy if user.target_accuracy is not None else 0.9
        else:
            base = user.p
        if self.mode == "match":
            return base
        if self.mode == "offset":
            return base + self.value
        raise ValueError(f"unknown p_hat mode {self.mode!r}")

    def label(self) -> str:
        if self.mode == "match":
            return "p_hat=p"
        if self.mode == "offset":
            return f"p_hat=p{self.value:+g}"
        return f"p_hat={self.value}"


@dataclass
class ExperimentConfig:
    scenarios: list[str]
    users: list[UserGridSpec]
    selectors: list[str]
    p_hats: list[PhatSpec] = field(default_factory=lambda: [PhatSpec()])
    trials: int = 10
    budget: int = 30
    master_seed: int = 0
    sample_count: int = 2000
    prior: str = "uniform"
    task_index: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        users = [UserGridSpec(**u) for u in doc["users"]]
        p_hats = [PhatSpec(**p) for p in doc.get("p_hats", [{}])]
        return ExperimentConfig(
            scenarios=list(doc["scenarios"]),
            users=users,
            selectors=list(doc["selectors"]),
            p_hats=p_hats,
            trials=doc.get("trials", 10),
            budget=doc.get("budget", 30),
            master_seed=doc.get("master_seed", 0),
            sample_count=doc.get("sample_count", 2000),
            prior=doc.get("prior", "uniform"),
            task_index=doc.get("task_index", 0),
        )


@dataclass(frozen=True)
class Cell:
    index: int
    scenario_ref: str
    scenario_index: int
    user: UserGridSpec
    selector: str
    p_hat: PhatSpec

    def label(self) -> str:
        return "|".join(
            [self.scenario_ref, self.user.label(), self.selector, self.p_hat.label()]
        )


def expand_cells(cfg: ExperimentConfig) -> list[Cell]:
    cells = []
    for si, sref in enumerate(cfg.scenarios):
        for user in cfg.users:
            for selector in cfg.selectors:
                for ph in cfg.p_hats:
                    cells.append(
                        Cell(len(cells), sref, si, user, selector, ph)
                    )
    return cells


def trial_seed(master: int, cell_index: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((master, cell_index, trial))


def region_seed(master: int, scenario_index: int) -> int:
    return int(
        np.random.SeedSequence((master, 0x7E6105, scenario_index)).generate_state(1)[0]
    )


def sample_true_weight(scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    lo, hi = weight_box(scenario.constraints)
    w = snap_array(lo + rng.random(len(lo)) * (hi - lo))
    return np.clip(w, lo, hi)


def _build_user(
    spec: UserGridSpec,
    scenario: Scenario,
    region_set: RegionSet,
    true_weight: np.ndarray,
    user_seed: int,
) -> SimulatedUser:
    if spec.model == MERR_CONSTANT:
        return SimulatedUser(MERR_CONSTANT, true_weight, p=spec.p, seed=user_seed)
    beta = spec.beta
    if beta is None:
        beta = calibrate_beta(
            region_set,
            true_weight,
            spec.target_accuracy,
            tolerance=spec.calibration_tolerance,
            seed=user_seed,
        )
    return SimulatedUser(MVR_LOGISTIC, true_weight, beta=beta, seed=user_seed)


def run_trial(
    cfg: ExperimentConfig,
    cell: Cell,
    trial: int,
    scenario: Scenario,
    region_set: RegionSet,
) -> list[dict]:
    ss = trial_seed(cfg.master_seed, cell.index, trial)
    w_child, user_child, session_child = ss.spawn(3)
    true_weight = sample_true_weight(scenario, np.random.default_rng(w_child))
    user = _build_user(
        cell.user, scenario, region_set, true_weight,
        int(user_child.generate_state(1)[0]),
    )
    p_hat = cell.p_hat.resolve(cell.user)
    session_cfg = SessionConfig(
        selector=cell.selector,
        p_hat=p_hat,
        budget=cfg.budget,
        sample_count=cfg.sample_count,
        prior=cfg.prior,
        beta=user.beta if cell.selector == "mvr" else None,
        task_index=cfg.task_index,
    )
    seed = int(session_child.generate_state(1)[0])
    result = run_session(scenario, user, session_cfg, seed, region_set=region_set)
    base = {
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario.name,
        "cell": cell.index,
        "trial": trial,
        "selector": cell.selector,
        "user_model": cell.user.model,
        "user_p": "" if cell.user.p is None else cell.user.p,
        "user_beta": "" if user.beta is None else repr(float(user.beta)),
        "p_hat": p_hat,
        "seed": seed,
        "true_region_id": "" if result.true_region_id is None else result.true_region_id,
        "iters_to_50": "" if result.iterations_to_half is None else result.iterations_to_half,
        "iters_to_90": "" if result.iterations_to_ninety is None else result.iterations_to_ninety,
        "error": "",
    }
    rows = []
    for it in range(result.trajectory.shape[0]):
        probs = result.trajectory[it]
        pt = 0.0 if result.posterior_true is None else float(result.posterior_true[it])
        current = result.current_history[it]
        rows.append(
            {
                **base,
                "iteration": it,
                "posterior_true": repr(pt),
                "posterior_max": repr(float(probs.max())),
                "current_region_id": current,
                "current_is_true": int(current == result.true_region_id),
            }
        )
    return rows


def _error_row(cfg, cell, trial, scenario_name, message) -> dict:
    row = {col: "" for col in CSV_COLUMNS}
    row.update(
        {
            "schema_version": SCHEMA_VERSION,
            "scenario": scenario_name,
            "cell": cell.index,
            "trial": trial,
            "selector": cell.selector,
            "user_model": cell.user.model,
            "iteration": -1,
            "error": message.replace("\n", " "),
        }
    )
    return row


def run_batch(
    cfg: ExperimentConfig,
    out,
    jobs: int = 1,
    progress: bool = False,
) -> int:
    """Run every (cell, trial), writing ordered CSV rows to ``out``.

    ``out`` is a path or text stream. Returns the number of data rows.
    Failing trials produce an error row and the batch continues.
    """
    cells = expand_cells(cfg)
    scenarios: dict[int, Scenario] = {}
    region_sets: dict[int, RegionSet] = {}
    for si, ref in enumerate(cfg.scenarios):
        scenario = resolve_scenario(ref)
        scenarios[si] = scenario
        region_sets[si] = sample_regions(
            scenario.graph,
            scenario.constraints,
            scenario.tasks[cfg.task_index],
            cfg.sample_count,
            region_seed(cfg.master_seed, si),
        )

    tasks = [(cell, trial) for cell in cells for trial in range(cfg.trials)]
    rows: list[tuple[tuple, list[dict]]] = []

    def run_one(cell: Cell, trial: int) -> list[dict]:
        scenario = scenarios[cell.scenario_index]
        try:
            return run_trial(cfg, cell, trial, scenario, region_sets[cell.scenario_index])
        except Exception as exc:  # noqa: BLE001 - batch must survive bad trials
            return [_error_row(cfg, cell, trial, scenario.name, f"{type(exc).__name__}: {exc}")]

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda ct: run_one(*ct), tasks))
    else:
        results = []
        for i, (cell, trial) in enumerate(tasks):
            results.append(run_one(cell, trial))
            if progress and sys.stderr.isatty():
                print(f"\r{i + 1}/{len(tasks)} trials", end="", file=sys.stderr)
        if progress and sys.stderr.isatty():
            print(file=sys.stderr)

    for (cell, trial), trial_rows in zip(tasks, results):
        for row in trial_rows:
            rows.append(((cell.index, trial, row["iteration"]), row))
    rows.sort(key=lambda x: x[0])

    close = False
    if isinstance(out, (str, Path)):
        handle = open(out, "w", newline="")
        close = True
    else:
        handle = out
    try:
        handle.write(f"# pathpref-batch schema_version={SCHEMA_VERSION}\n")
        handle.write(f"# generated_at={time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}\n")
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for _, row in rows:
            writer.writerow(row)
    finally:
        if close:
            handle.close()
    return len(rows)


def read_batch_csv(source) -> list[dict]:
    """Read rows back, skipping comment lines; numeric fields stay strings."""
    close = False
    if isinstance(source, (str, Path)):
        handle = open(source, newline="")
        close = True
    else:
        handle = source
    try:
        data = [line for line in handle if not line.startswith("#")]
    finally:
        if close:
            handle.close()
    return list(csv.DictReader(io.StringIO("".join(data))))


def summarize(rows: Sequence[dict], snapshots: tuple[int, ...] = (10, 20, 30)) -> dict:
    """Per-cell convergence fractions, median trajectories, and snapshots."""
    if not rows:
        raise ValueError("empty dataset")
    cells: dict[str, list[dict]] = {}
    for row in rows:
        cells.setdefault(row["cell"], []).append(row)
    report: dict = {"schema_version": SCHEMA_VERSION, "cells": {}}
    for cell_id, cell_rows in sorted(cells.items(), key=lambda kv: int(kv[0])):
        ok_rows = [r for r in cell_rows if r["error"] == ""]
        err_trials = {r["trial"] for r in cell_rows if r["error"] != ""}
        trials = sorted({r["trial"] for r in ok_rows}, key=int)
        by_trial = {t: [r for r in ok_rows if r["trial"] == t] for t in trials}
        reach_50 = reach_90 = 0
        finals = []
        for t in trials:
            t_rows = by_trial[t]
            if t_rows[0]["iters_to_50"] != "":
                reach_50 += 1
            if t_rows[0]["iters_to_90"] != "":
                reach_90 += 1
            last = max(t_rows, key=lambda r: int(r["iteration"]))
            finals.append(float(last["posterior_true"]))
        by_iter: dict[int, list[float]] = {}
        for r in ok_rows:
            by_iter.setdefault(int(r["iteration"]), []).append(float(r["posterior_true"]))
        meta = ok_rows[0] if ok_rows else cell_rows[0]
        report["cells"][cell_id] = {
            "label": {
                "scenario": meta["scenario"],
                "selector": meta["selector"],
                "user_model": meta["user_model"],
                "user_p": meta["user_p"],
                "p_hat": meta["p_hat"],
            },
            "trials": len(trials),
            "error_trials": len(err_trials),
            "fraction_reaching_50": reach_50 / len(trials) if trials else 0.0,
            "fraction_reaching_90": reach_90 / len(trials) if trials else 0.0,
            "median_final_posterior": median(finals) if finals else None,
            "median_posterior_by_iteration": {
                str(it): median(vals) for it, vals in sorted(by_iter.items())
            },
            "snapshots": {
                str(it): sorted(by_iter.get(it, []))
                for it in snapshots
                if it in by_iter
            },
        }
    return report
