"""The Runtime Environment web service: persists agent templates and
run-time configurations, compiles block documents on demand (the editor's
live preview), and manages the lifecycle of MAS runs.

Templates and configurations survive restarts; runs are in-memory and any
run interrupted by a restart is marked stopped on the next startup.
"""

from __future__ import annotations

import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from ..blocks import analyze, base_catalog, parse_blocks_document
from ..errors import BlockspeakError
from ..lang import print_agent, print_literal
from ..runtime import RunHandle, RunLog, WotActionDispatcher, run_mas
from ..wot.client import WotClient
from .common import (
    ConfigurationError,
    TemplateError,
    check_entries,
    compile_template,
    instantiate,
)
from .storage import NAME_RE, JsonDirStore

DEFAULT_MAX_RUNS = 8


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class RunManager:
    def __init__(self, records: JsonDirStore, max_runs: int):
        self.records = records
        self.max_runs = max_runs
        self.live: dict[str, RunHandle] = {}
        self.lock = threading.Lock()
        # runs never survive a restart; anything still marked running is stale
        for name in self.records.names():
            record = self.records.load(name)
            if record and record.get("status") == "running":
                record["status"] = "stopped"
                record["stoppedAt"] = _now()
                self.records.save(name, record)

    def running_count(self) -> int:
        with self.lock:
            return sum(1 for h in self.live.values() if h.status == "running")

    def record_of(self, run_id: str) -> Optional[dict]:
        try:
            return self.records.load(run_id)
        except ValueError:
            return None

    def register(self, handle: RunHandle, configuration: str) -> dict:
        record = {
            "runId": handle.run_id,
            "configuration": configuration,
            "status": "running",
            "startedAt": _now(),
        }
        with self.lock:
            self.live[handle.run_id] = handle
        self.records.save(handle.run_id, record)
        return record

    def stop(self, run_id: str) -> dict:
        with self.lock:
            handle = self.live.get(run_id)
        if handle is not None:
            handle.stop()
        record = self.record_of(run_id) or {"runId": run_id}
        record["status"] = "stopped"
        record["stoppedAt"] = _now()
        self.records.save(run_id, record)
        return record

    def stop_all(self) -> None:
        with self.lock:
            handles = list(self.live.values())
        for handle in handles:
            if handle.status == "running":
                self.stop(handle.run_id)


def create_app(data_dir, td_repo_url: Optional[str] = None,
               max_runs: int = DEFAULT_MAX_RUNS,
               client: Optional[WotClient] = None) -> FastAPI:
    data = Path(data_dir)
    templates = JsonDirStore(data / "agents")
    configurations = JsonDirStore(data / "configs")
    runs = RunManager(JsonDirStore(data / "runs"), max_runs)
    wot_client = client or WotClient()
    catalog = base_catalog()
    app = FastAPI(title="Agent runtime")
    app.state.runs = runs

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    async def json_body(request: Request):
        try:
            return await request.json()
        except Exception:
            return None

    def diagnostics_response(diags: list[dict]) -> JSONResponse:
        return JSONResponse(status_code=400, content={"diagnostics": diags})

    # -- agent templates ------------------------------------------------------

    @app.put("/agents/{name}")
    async def put_agent(name: str, request: Request):
        if not NAME_RE.match(name):
            return error(400, f"invalid template name {name!r}")
        body = await json_body(request)
        if not isinstance(body, dict):
            return error(400, "template body must be a JSON object")
        source_kind = body.get("sourceKind")
        source = body.get("body")
        try:
            compile_template(source_kind, source, name=name)
        except TemplateError as e:
            return diagnostics_response(e.diagnostics)
        existed = templates.exists(name)
        stored = {"name": name, "sourceKind": source_kind, "body": source,
                  "updatedAt": _now()}
        templates.save(name, stored)
        return JSONResponse(status_code=200 if existed else 201, content=stored)

    @app.get("/agents")
    def list_agents():
        return [templates.load(n) for n in templates.names()]

    @app.get("/agents/{name}")
    def get_agent(name: str):
        template = templates.load(name) if NAME_RE.match(name) else None
        if template is None:
            return error(404, f"unknown template {name!r}")
        return template

    @app.delete("/agents/{name}")
    def delete_agent(name: str):
        if not (NAME_RE.match(name) and templates.delete(name)):
            return error(404, f"unknown template {name!r}")
        return Response(status_code=204)

    # -- live code preview -------------------------------------------------------

    @app.post("/compile")
    async def compile_preview(request: Request):
        body = await json_body(request)
        try:
            document = parse_blocks_document(body)
        except BlockspeakError as e:
            return JSONResponse(status_code=400, content={
                "source": None,
                "diagnostics": [{"severity": "error", "code": "BadDocument",
                                 "message": str(e)}]})
        program, diagnostics = analyze(document, catalog)
        payload = [d.to_dict() for d in diagnostics]
        if program is None or any(d.severity == "error" for d in diagnostics):
            return JSONResponse(status_code=400,
                                content={"source": None, "diagnostics": payload})
        return {"source": print_agent(program), "diagnostics": payload}

    # -- configurations --------------------------------------------------------

    @app.put("/configurations/{name}")
    async def put_configuration(name: str, request: Request):
        if not NAME_RE.match(name):
            return error(400, f"invalid configuration name {name!r}")
        body = await json_body(request)
        if not isinstance(body, dict):
            return error(400, "configuration body must be a JSON object")
        workspace = body.get("workspace")
        if workspace is not None and (not isinstance(workspace, str)
                                      or not NAME_RE.match(workspace)):
            return error(400, "bad workspace name")
        try:
            entries = check_entries(body.get("entries"))
        except ConfigurationError as e:
            return error(400, str(e))
        existed = configurations.exists(name)
        stored = {"name": name, "entries": entries, "workspace": workspace,
                  "updatedAt": _now()}
        configurations.save(name, stored)
        return JSONResponse(status_code=200 if existed else 201, content=stored)

    @app.get("/configurations")
    def list_configurations():
        return [configurations.load(n) for n in configurations.names()]

    @app.get("/configurations/{name}")
    def get_configuration(name: str):
        configuration = configurations.load(name) if NAME_RE.match(name) else None
        if configuration is None:
            return error(404, f"unknown configuration {name!r}")
        return configuration

    @app.delete("/configurations/{name}")
    def delete_configuration(name: str):
        if not (NAME_RE.match(name) and configurations.delete(name)):
            return error(404, f"unknown configuration {name!r}")
        return Response(status_code=204)

    # -- runs ---------------------------------------------------------------------

    @app.post("/runs")
    async def start_run(request: Request):
        body = await json_body(request)
        config_name = body.get("configuration") if isinstance(body, dict) else None
        if not isinstance(config_name, str) or not NAME_RE.match(config_name):
            return error(400, "body must name a configuration")
        configuration = configurations.load(config_name)
        if configuration is None:
            return error(404, f"unknown configuration {config_name!r}")
        if runs.running_count() >= max_runs:
            return error(429, f"at capacity ({max_runs} concurrent runs)")

        needed = {e["template"] for e in configuration["entries"]}
        programs_by_template = {}
        for template_name in sorted(needed):
            template = templates.load(template_name)
            if template is None:
                return error(409, f"configuration references missing template "
                                  f"{template_name!r}")
            try:
                programs_by_template[template_name] = compile_template(
                    template["sourceKind"], template["body"], name=template_name)
            except TemplateError as e:
                return diagnostics_response(e.diagnostics)

        programs = instantiate(programs_by_template, configuration["entries"])
        run_id = uuid.uuid4().hex[:12]
        log = RunLog(run_id)
        # TDs resolve at run start; unresolved things fail at invocation time,
        # not here (devices may come online later)
        workspace = configuration.get("workspace")
        if workspace and td_repo_url:
            try:
                tds, warnings = wot_client.fetch_workspace_tds(td_repo_url, workspace)
                log.info("-", f"workspace {workspace!r}: {len(tds)} TD(s) resolved")
                for w in warnings:
                    log.warning("-", w)
            except BlockspeakError as e:
                log.warning("-", f"workspace {workspace!r} unavailable: {e}")
        handle = run_mas(programs, dispatcher=WotActionDispatcher(wot_client),
                         run_id=run_id, log=log)
        record = runs.register(handle, config_name)
        return JSONResponse(status_code=201, content=record)

    @app.get("/runs")
    def list_runs():
        return [runs.record_of(n) for n in runs.records.names()]

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        record = runs.record_of(run_id)
        if record is None:
            return error(404, f"unknown run {run_id!r}")
        return record

    @app.delete("/runs/{run_id}")
    def stop_run(run_id: str):
        record = runs.record_of(run_id)
        if record is None:
            return error(404, f"unknown run {run_id!r}")
        if record.get("status") == "stopped":
            return error(410, "run already stopped")
        return runs.stop(run_id)

    @app.get("/runs/{run_id}/agents/{agent}/beliefs")
    def get_beliefs(run_id: str, agent: str):
        record = runs.record_of(run_id)
        if record is None:
            return error(404, f"unknown run {run_id!r}")
        if record.get("status") == "stopped":
            return error(410, "run is stopped")
        handle = runs.live.get(run_id)
        if handle is None:
            return error(410, "run is stopped")
        instance = handle.container.agents.get(agent)
        if instance is None:
            return error(404, f"run has no agent {agent!r}")
        return [print_literal(l) for l in instance.belief_base.facts]

    @app.get("/runs/{run_id}/log")
    def get_log(run_id: str, since: int = 0):
        record = runs.record_of(run_id)
        if record is None:
            return error(404, f"unknown run {run_id!r}")
        handle = runs.live.get(run_id)
        if handle is None:  # stopped before this service instance started
            return {"lines": [], "next": since}
        lines, cursor = handle.container.log.since(since)
        return {"lines": lines, "next": cursor}

    return app
