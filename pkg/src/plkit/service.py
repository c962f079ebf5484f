"""HTTP/JSON API over models, validation, queries, matching and sessions.

All wizard state lives server-side keyed by sequential integer ids, so the
web configurator stays a thin view: every forced/open/conflict fact it
shows comes from a response of this service. Models and compiled systems
are immutable once stored; requests to one session are serialized by a
per-session lock. Nothing persists across restarts.

Error bodies are {code, message, details} with codes mirroring the CLI
exit semantics: 1 validation, 2 unsatisfiable/conflict, 3 bad request,
4 not found / I/O.
"""

from __future__ import annotations

import json
import logging
import threading
from fractions import Fraction
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import modelio, solver
from .cli import format_score
from .compiler import compile_model, render_constraint
from .matcher import match as match_requirements
from .model import FeatureModel, InvalidModelError
from .rational import format_rational, parse_rational
from .session import AmbiguousMustError, DerivationSession, SessionError
from .validator import has_errors, validate_draft

log = logging.getLogger("plkit.service")


class ApiError(Exception):
    def __init__(self, status: int, code: int, message: str, details=None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details if details is not None else []
        super().__init__(message)


class ModelHandle:
    def __init__(self, handle_id: int, model: FeatureModel, diagnostics):
        self.id = handle_id
        self.model = model
        self.system = compile_model(model)
        self.diagnostics = diagnostics


class SessionHandle:
    def __init__(self, handle_id: int, model_handle: ModelHandle):
        self.id = handle_id
        self.model_id = model_handle.id
        self.session = DerivationSession(model_handle.model)
        self.cursor = None
        self.cursor_decisions = None
        self.lock = threading.Lock()


class Registry:
    def __init__(self):
        self.models = {}
        self.sessions = {}
        self._next_model = 1
        self._next_session = 1
        self._lock = threading.Lock()

    def add_model(self, model: FeatureModel, diagnostics) -> ModelHandle:
        with self._lock:
            handle = ModelHandle(self._next_model, model, diagnostics)
            self.models[handle.id] = handle
            self._next_model += 1
            return handle

    def add_session(self, model_handle: ModelHandle) -> SessionHandle:
        with self._lock:
            handle = SessionHandle(self._next_session, model_handle)
            self.sessions[handle.id] = handle
            self._next_session += 1
            return handle

    def model(self, model_id: int) -> ModelHandle:
        try:
            return self.models[model_id]
        except KeyError:
            raise ApiError(404, 4, f"unknown model {model_id}") from None

    def session(self, session_id: int) -> SessionHandle:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise ApiError(404, 4, f"unknown session {session_id}") from None


def conflict_json(conflict) -> dict:
    if conflict is None:
        return {"violated": None, "provenance": "search exhausted", "trail": []}
    return {
        "violated": render_constraint(conflict.violated) if conflict.violated is not None else None,
        "provenance": conflict.provenance,
        "trail": [
            {"feature": t.feature, "value": t.value, "reason": t.reason} for t in conflict.trail
        ],
    }


def consequences_json(consequences, decisions, status: str) -> dict:
    body = {
        "forced_in": sorted(consequences.forced_in),
        "forced_out": sorted(consequences.forced_out),
        "open": sorted(consequences.open),
        "decided": [
            {"feature": d.feature, "state": d.state, "origin": d.origin} for d in decisions
        ],
        "status": status,
    }
    if consequences.conflict is not None or status == "conflicted":
        body["conflict"] = conflict_json(consequences.conflict)
    return body


def session_state_json(handle: SessionHandle) -> dict:
    return consequences_json(handle.session.consequences, handle.session.decisions,
                             handle.session.status)


def diagnostics_json(diagnostics) -> list:
    return [d.to_json() for d in diagnostics]


def _parse_fraction(value, name: str) -> Fraction:
    try:
        if isinstance(value, str):
            return parse_rational(value)
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            return Fraction(str(value))
    except ValueError:
        pass
    raise ApiError(400, 3, f"bad value for {name}: {value!r}")


def _require(payload: dict, key: str):
    if not isinstance(payload, dict) or key not in payload:
        raise ApiError(400, 3, f"missing field {key!r}")
    return payload[key]


def _match_inputs(handle: ModelHandle, payload: dict):
    requirements_text = _require(payload, "requirements")
    try:
        requirements = modelio.parse_requirements(
            modelio.SourceDocument.from_text(str(requirements_text), "<requirements>"))
        lexicon_text = payload.get("lexicon") or ""
        lexicon = modelio.parse_lexicon(
            modelio.SourceDocument.from_text(str(lexicon_text), "<lexicon>"))
    except modelio.ParseError as exc:
        raise ApiError(400, 1, str(exc)) from None
    metric = str(payload.get("metric", "dice"))
    threshold = _parse_fraction(payload.get("threshold", "0.5"), "threshold")
    gap = _parse_fraction(payload.get("gap", "0.1"), "gap")
    try:
        report = match_requirements(requirements, handle.model, lexicon, metric, threshold, gap)
    except ValueError as exc:
        raise ApiError(400, 3, str(exc)) from None
    return requirements, report


def match_report_json(report) -> dict:
    return {
        "model": report.model,
        "metric": report.metric,
        "a": format_rational(report.a),
        "b": format_rational(report.b),
        "threshold": format_rational(report.threshold),
        "gap": format_rational(report.gap),
        "entries": [
            {"requirement": e.requirement, "feature": e.feature, "score": format_score(e.score)}
            for e in report.sorted_entries()
        ],
        "classification": {
            rid: {"kind": c.kind, "features": list(c.features)}
            for rid, c in sorted(report.classification.items())
        },
        "capitalization_candidates": sorted(report.capitalization_candidates()),
    }


def create_app(models_dir=None) -> FastAPI:
    app = FastAPI(title="plkit service")
    registry = Registry()
    app.state.registry = registry

    @app.exception_handler(ApiError)
    async def handle_api_error(_request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    def store_model_text(text: str, origin: str) -> ModelHandle:
        try:
            draft, _ = modelio.parse_draft(modelio.SourceDocument.from_text(text, origin))
        except modelio.ParseError as exc:
            raise ApiError(400, 1, str(exc)) from None
        return _store_draft(draft)

    def _store_draft(draft) -> ModelHandle:
        model, diagnostics = validate_draft(draft)
        if model is None or has_errors(diagnostics):
            raise ApiError(422, 1, "model failed validation", diagnostics_json(diagnostics))
        return registry.add_model(model, diagnostics)

    @app.post("/models", status_code=201)
    async def post_models(request: Request):
        raw = await request.body()
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        if content_type == "application/json":
            try:
                payload = json.loads(raw)
                draft = modelio.draft_from_json(payload)
            except (ValueError, KeyError, TypeError) as exc:
                raise ApiError(400, 3, f"malformed model JSON: {exc}") from None
            handle = _store_draft(draft)
        else:
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise ApiError(400, 3, "body is not UTF-8 text") from None
            handle = store_model_text(text, "<request>")
        return {"model_id": handle.id, "diagnostics": diagnostics_json(handle.diagnostics)}

    @app.get("/models/{model_id}")
    def get_model(model_id: int):
        handle = registry.model(model_id)
        return {
            "model_id": handle.id,
            "model": modelio.model_to_json(handle.model),
            "diagnostics": diagnostics_json(handle.diagnostics),
        }

    @app.get("/models/{model_id}/count")
    def get_count(model_id: int):
        handle = registry.model(model_id)
        return {"count": solver.count(handle.system)}

    @app.post("/models/{model_id}/match")
    def post_match(model_id: int, payload: dict):
        handle = registry.model(model_id)
        _, report = _match_inputs(handle, payload)
        return match_report_json(report)

    @app.post("/models/{model_id}/sessions", status_code=201)
    def post_sessions(model_id: int):
        model_handle = registry.model(model_id)
        try:
            handle = registry.add_session(model_handle)
        except SessionError as exc:
            raise ApiError(422, 1, str(exc), diagnostics_json(exc.diagnostics)) from None
        return {"session_id": handle.id, "consequences": session_state_json(handle)}

    def _decision_payload(handle: SessionHandle, payload: dict):
        feature = str(_require(payload, "feature"))
        state = str(_require(payload, "state"))
        if state not in ("in", "out"):
            raise ApiError(400, 3, f"state must be 'in' or 'out', got {state!r}")
        if feature not in handle.session.model.feature_set:
            raise ApiError(400, 3, f"unknown feature {feature!r}")
        return feature, state

    @app.post("/sessions/{session_id}/decisions")
    def post_decision(session_id: int, payload: dict):
        handle = registry.session(session_id)
        with handle.lock:
            feature, state = _decision_payload(handle, payload)
            try:
                handle.session.decide(feature, state)
            except SessionError as exc:
                raise ApiError(409, 2, str(exc)) from None
            handle.cursor = None
            return session_state_json(handle)

    @app.delete("/sessions/{session_id}/decisions/last")
    def delete_decision(session_id: int):
        handle = registry.session(session_id)
        with handle.lock:
            try:
                handle.session.undo()
            except SessionError as exc:
                raise ApiError(409, 2, str(exc)) from None
            handle.cursor = None
            return session_state_json(handle)

    @app.post("/sessions/{session_id}/whatif")
    def post_whatif(session_id: int, payload: dict):
        handle = registry.session(session_id)
        with handle.lock:
            feature, state = _decision_payload(handle, payload)
            try:
                consequences = handle.session.what_if(feature, state)
            except SessionError as exc:
                raise ApiError(409, 2, str(exc)) from None
            from .session import Decision

            hypothetical = list(handle.session.decisions) + [Decision(feature, state, "what-if")]
            status = "conflicted" if consequences.status == "conflict" else handle.session.status
            return consequences_json(consequences, hypothetical, status)

    @app.get("/sessions/{session_id}/solutions")
    def get_solutions(session_id: int, limit: int | None = None, restart: bool = False):
        handle = registry.session(session_id)
        with handle.lock:
            session = handle.session
            if session.status == "conflicted":
                raise ApiError(409, 2, "session is conflicted",
                               conflict_json(session.consequences.conflict))
            if restart or handle.cursor is None:
                handle.cursor = solver.iterate(session.system, session.partial())
            configurations = []
            exhausted = False
            while limit is None or len(configurations) < limit:
                solution = handle.cursor.next_solution()
                if solution is None:
                    exhausted = True
                    break
                configurations.append(sorted(solution))
            return {"configurations": configurations, "exhausted": exhausted}

    @app.post("/sessions/{session_id}/optimize")
    def post_optimize(session_id: int, payload: dict):
        handle = registry.session(session_id)
        with handle.lock:
            session = handle.session
            if session.status == "conflicted":
                raise ApiError(409, 2, "session is conflicted",
                               conflict_json(session.consequences.conflict))
            attribute = str(_require(payload, "attr"))
            direction = str(_require(payload, "direction"))
            direction = {"min": "minimize", "max": "maximize"}.get(direction, direction)
            if direction not in ("minimize", "maximize"):
                raise ApiError(400, 3, f"direction must be minimize or maximize, got {direction!r}")
            objective = solver.Objective.from_model(session.model, attribute, direction)
            outcome = solver.optimize(session.system, session.partial(), objective)
            if isinstance(outcome, solver.Unsat):
                raise ApiError(409, 2, "no configuration extends the current decisions",
                               conflict_json(outcome.conflict))
            configuration, value = outcome
            totals = {
                attr: format_rational(sum(
                    (session.model.attribute_value(fid, attr) for fid in configuration),
                    Fraction(0)))
                for attr in session.model.attribute_names()
            }
            return {
                "configuration": sorted(configuration),
                "value": format_rational(value),
                "totals": totals,
            }

    @app.post("/sessions/{session_id}/musts")
    def post_musts(session_id: int, payload: dict):
        handle = registry.session(session_id)
        with handle.lock:
            session = handle.session
            model_handle = registry.model(handle.model_id)
            requirements, report = _match_inputs(model_handle, payload)
            try:
                session.apply_musts(requirements, report)
            except AmbiguousMustError as exc:
                raise ApiError(409, 1, str(exc),
                               {rid: list(fids) for rid, fids in exc.ambiguous.items()}) from None
            except SessionError as exc:
                raise ApiError(409, 2, str(exc)) from None
            handle.cursor = None
            body = {
                "consequences": session_state_json(handle),
                "warnings": list(session.warnings),
                "capitalization_candidates": [req.id for req in session.capitalization],
            }
            if session.status == "conflicted":
                return JSONResponse(status_code=409, content={
                    "code": 2,
                    "message": "conflicting must requirements",
                    "details": body,
                })
            return body

    if models_dir:
        _preload(registry, models_dir)

    static_dir = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    if static_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def _preload(registry: Registry, models_dir) -> None:
    directory = Path(models_dir)
    if not directory.is_dir():
        raise OSError(f"not a directory: {models_dir}")
    for path in sorted(directory.iterdir()):
        if not path.is_file():
            continue
        try:
            model = modelio.parse_model(modelio.SourceDocument.from_path(path))
            _, diagnostics = validate_draft_from_model(model)
            if has_errors(diagnostics):
                log.warning("skipping %s: validation errors", path.name)
                continue
            registry.add_model(model, diagnostics)
            log.info("preloaded %s", path.name)
        except (modelio.ParseError, InvalidModelError, OSError) as exc:
            log.warning("skipping %s: %s", path.name, exc)


def validate_draft_from_model(model: FeatureModel):
    from .validator import validate_model

    return model, validate_model(model)
