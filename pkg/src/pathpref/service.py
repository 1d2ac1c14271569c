"""Session-oriented HTTP API for live preference learning.

One session per human operator: create it from a preset or an inline
scenario document, fetch the pending query pair, post a preference (guarded
by an optimistic version counter), and inspect the posterior. Accepted
feedback is journaled to append-only files; on restart the journals are
replayed, which reproduces each session exactly because the whole loop is
deterministic given its seed and feedback sequence.
"""
from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import session as sess
from .bayes import best_region
from .errors import PathprefError, ScenarioFormatError
from .graph import PathRecord
from .scenarios import (
    Scenario,
    preset_names,
    preset_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .session import SessionConfig, SessionState

DEFAULT_TOP_K = 10


class SessionConfigBody(BaseModel):
    selector: Literal["merr", "mvr", "random"] = "merr"
    p_hat: float = 0.9
    budget: int = 30
    sample_count: int = 2000
    prior: Literal["uniform", "support"] = "uniform"
    beta: float | None = None
    early_stop: float | None = None
    task_index: int = 0
    seed: int = 0


class CreateSessionBody(BaseModel):
    preset: str | None = None
    scenario: dict | None = None
    config: SessionConfigBody = SessionConfigBody()


class FeedbackBody(BaseModel):
    choice: Literal["current", "new"]
    version: int


@dataclass
class LiveSession:
    session_id: str
    scenario_doc: dict
    scenario: Scenario
    state: SessionState
    seed: int
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def _path_payload(scenario: Scenario, state: SessionState, region_id: int) -> dict:
    path = state.path_of(region_id)
    return _raw_path_payload(scenario, path, region_id)


def _raw_path_payload(scenario: Scenario, path: PathRecord, region_id: int) -> dict:
    g = scenario.graph
    vertices = []
    if path.edge_ids:
        vertices.append(g.edge(path.edge_ids[0]).tail)
        for eid in path.edge_ids:
            vertices.append(g.edge(eid).head)
    geometry = None
    if g.coords:
        geometry = [list(g.coords[v]) for v in vertices if v in g.coords]
    return {
        "region_id": region_id,
        "edge_ids": list(path.edge_ids),
        "vertices": vertices,
        "geometry": geometry,
        "total_time": path.total_time,
        "violations": {
            c.id: int(v) for c, v in zip(scenario.constraints, path.violations) if v
        },
    }


def _posterior_payload(live: LiveSession, top_k: int) -> dict:
    state = live.state
    region, weight = best_region(state.posterior)
    snapshot = state.posterior.to_dict(top=top_k)
    return {
        "version": live.version,
        "iteration": state.n,
        "n_regions": len(state.region_set),
        "top": snapshot["regions"],
        "best": {
            "region_id": region.region_id,
            "weight": weight.tolist(),
            "path": _path_payload(live.scenario, state, region.region_id),
        },
    }


def _final_payload(live: LiveSession) -> dict:
    out = _posterior_payload(live, DEFAULT_TOP_K)
    out["finished"] = True
    out["converged_by_vacuity"] = live.state.converged_by_vacuity
    out["exhausted_candidates"] = live.state.exhausted_candidates
    out["early_stopped"] = live.state.early_stopped
    return out


def _query_payload(live: LiveSession) -> dict:
    state = live.state
    pair = state.pending
    return {
        "version": live.version,
        "iteration": state.n,
        "budget": state.budget,
        "selector": pair.selector,
        "current": _path_payload(live.scenario, state, pair.current),
        "proposed": _path_payload(live.scenario, state, pair.proposed),
    }


def create_app(journal_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="pathpref session service", version="1")
    sessions: dict[str, LiveSession] = {}
    journal_path = Path(journal_dir) if journal_dir else None
    if journal_path:
        journal_path.mkdir(parents=True, exist_ok=True)

    def journal_file(session_id: str) -> Path | None:
        return journal_path / f"{session_id}.jsonl" if journal_path else None

    def journal_append(session_id: str, record: dict) -> None:
        f = journal_file(session_id)
        if f is not None:
            with f.open("a") as handle:
                handle.write(json.dumps(record) + "\n")

    def build_session(
        session_id: str, scenario_doc: dict, config: SessionConfigBody
    ) -> LiveSession:
        scenario = scenario_from_dict(scenario_doc)
        cfg = SessionConfig(
            selector=config.selector,
            p_hat=config.p_hat,
            budget=config.budget,
            sample_count=config.sample_count,
            prior=config.prior,
            beta=config.beta,
            early_stop=config.early_stop,
            task_index=config.task_index,
        )
        state = sess.init_session(scenario, cfg, config.seed)
        return LiveSession(
            session_id=session_id,
            scenario_doc=scenario_doc,
            scenario=scenario,
            state=state,
            seed=config.seed,
        )

    def restore_from_journals() -> None:
        if journal_path is None:
            return
        for f in sorted(journal_path.glob("*.jsonl")):
            lines = [json.loads(line) for line in f.read_text().splitlines() if line]
            if not lines or lines[0].get("type") != "create":
                continue
            head = lines[0]
            live = build_session(
                head["session_id"],
                head["scenario"],
                SessionConfigBody(**head["config"]),
            )
            for rec in lines[1:]:
                if rec.get("type") != "feedback":
                    continue
                sess.step(live.state, rec["choice"])
                live.version += 1
            sessions[live.session_id] = live

    restore_from_journals()

    def get_live(session_id: str) -> LiveSession:
        live = sessions.get(session_id)
        if live is None:
            raise HTTPException(status_code=404, detail="unknown session id")
        return live

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "sessions": len(sessions)}

    @app.get("/presets")
    def presets():
        return {"presets": preset_names()}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if (body.preset is None) == (body.scenario is None):
            raise HTTPException(
                status_code=400, detail="provide exactly one of 'preset' or 'scenario'"
            )
        try:
            if body.preset is not None:
                scenario_doc = scenario_to_dict(preset_scenario(body.preset))
            else:
                scenario_doc = body.scenario
            session_id = uuid.uuid4().hex
            live = build_session(session_id, scenario_doc, body.config)
        except ScenarioFormatError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except PathprefError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        sessions[session_id] = live
        journal_append(
            session_id,
            {
                "type": "create",
                "session_id": session_id,
                "scenario": scenario_doc,
                "config": body.config.model_dump(),
            },
        )
        state = live.state
        return {
            "session_id": session_id,
            "version": live.version,
            "budget": state.budget,
            "n_regions": len(state.region_set),
            "already_converged": state.pending is None,
            "initial_path": _path_payload(live.scenario, state, state.current_region),
            "render": live.scenario.render,
        }

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        live = get_live(session_id)
        with live.lock:
            if live.state.pending is None:
                return JSONResponse(status_code=410, content=_final_payload(live))
            return _query_payload(live)

    @app.post("/sessions/{session_id}/feedback")
    def post_feedback(session_id: str, body: FeedbackBody):
        live = get_live(session_id)
        with live.lock:
            if live.state.pending is None:
                return JSONResponse(status_code=410, content=_final_payload(live))
            if body.version != live.version:
                raise HTTPException(
                    status_code=409,
                    detail={
                        "message": "stale version; session advanced",
                        "version": live.version,
                    },
                )
            before = live.state.current_region
            sess.step(live.state, body.choice)
            live.version += 1
            journal_append(
                session_id,
                {"type": "feedback", "choice": body.choice, "version": live.version},
            )
            return {
                "version": live.version,
                "iteration": live.state.n,
                "current_changed": live.state.current_region != before,
                "current_region_id": live.state.current_region,
                "finished": live.state.pending is None,
            }

    @app.get("/sessions/{session_id}/posterior")
    def get_posterior(session_id: str, k: int = DEFAULT_TOP_K):
        live = get_live(session_id)
        with live.lock:
            return _posterior_payload(live, k)

    @app.get("/sessions/{session_id}/render")
    def get_render(session_id: str):
        live = get_live(session_id)
        return {
            "render": live.scenario.render,
            "name": live.scenario.name,
            "tasks": [
                {"start": t.start, "goal": t.goal} for t in live.scenario.tasks
            ],
        }

    @app.get("/sessions/{session_id}/result")
    def get_result(session_id: str):
        live = get_live(session_id)
        with live.lock:
            payload = _final_payload(live)
            payload["finished"] = live.state.pending is None
            return payload

    return app
