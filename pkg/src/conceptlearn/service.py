"""Batch HTTP learning service.

POST /learn runs a learner synchronously over the shared, immutable KB and
returns the same JSON document the CLI emits. GET /health reports KB
statistics. Request bodies are validated by hand so schema violations map
to 400 (naming the offending field) and unknown example IRIs to 422.
"""
from __future__ import annotations

import logging
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from .kb import KnowledgeBase
from .quality import LearningProblemError, learning_problem_from_dict
from .reasoner import ClassHierarchy, classify
from .runner import ConfigError, LEARNERS, run_learning

log = logging.getLogger(__name__)

DEFAULT_MAX_RUNTIME_SECONDS = 30.0


def create_app(kb: KnowledgeBase, hierarchy: ClassHierarchy | None = None,
               max_runtime_cap: float = DEFAULT_MAX_RUNTIME_SECONDS) -> FastAPI:
    hierarchy = hierarchy or classify(kb)
    app = FastAPI(title="conceptlearn")

    def bad_request(field: str, message: str):
        return JSONResponse(status_code=400, content={"field": field, "error": message})

    @app.get("/health")
    def health():
        return kb.stats()

    @app.post("/learn")
    async def learn_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return bad_request("body", "request body must be a JSON object")
        if not isinstance(body, dict):
            return bad_request("body", "request body must be a JSON object")
        unknown = set(body) - {"learning_problem", "learner", "config",
                               "emit_sparql", "verbalize"}
        if unknown:
            return bad_request(sorted(unknown)[0], "unknown field")
        if "learning_problem" not in body:
            return bad_request("learning_problem", "missing field")
        try:
            lp = learning_problem_from_dict(body["learning_problem"])
        except LearningProblemError as exc:
            return bad_request("learning_problem", str(exc))
        learner = body.get("learner", "celoe")
        if learner not in LEARNERS:
            return bad_request("learner", f"must be one of {', '.join(LEARNERS)}")
        config = body.get("config", {})
        if not isinstance(config, dict):
            return bad_request("config", "must be an object")
        for flag in ("emit_sparql", "verbalize"):
            if not isinstance(body.get(flag, False), bool):
                return bad_request(flag, "must be a boolean")
        if learner != "evo":
            config = dict(config)
            cap = min(float(config.get("max_runtime_seconds", max_runtime_cap)),
                      max_runtime_cap)
            config["max_runtime_seconds"] = cap

        missing = [i.value for i in sorted(lp.positives | lp.negatives, key=lambda x: x.value)
                   if i not in kb.index_of]
        if missing:
            return JSONResponse(status_code=422,
                                content={"error": "unknown example individuals",
                                         "individuals": missing})
        try:
            # threadpool keeps the event loop (and /health) responsive
            report = await run_in_threadpool(
                run_learning, kb, hierarchy, lp, learner=learner,
                config_overrides=config,
                emit_sparql=bool(body.get("emit_sparql", False)),
                emit_verbalization=bool(body.get("verbalize", False)))
        except ConfigError as exc:
            return bad_request("config", str(exc))
        except Exception:
            error_id = uuid.uuid4().hex
            log.exception("learn request failed (error id %s)", error_id)
            return JSONResponse(status_code=500, content={"error_id": error_id})
        return JSONResponse(status_code=200, content=report)

    return app
