"""The Smart Environment TD Repository: workspaces of Thing Descriptions
behind a small JSON HTTP API.

Uploads are validated (parse_td) but stored byte-identical; what a client
GETs back is exactly what was POSTed. Any service able to serve TDs grouped
into workspaces can replace this one; consumers only rely on the routes here.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from pathlib import Path
from urllib.parse import quote, unquote

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from ..errors import BlockspeakError
from ..wot.td import parse_td
from .storage import NAME_RE, atomic_write_bytes


def create_app(data_dir) -> FastAPI:
    root = Path(data_dir) / "td"
    root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="TD repository")
    locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
    locks_guard = threading.Lock()

    def lock_for(ws: str) -> threading.Lock:
        with locks_guard:
            return locks[ws]

    def ws_dir(ws: str) -> Path:
        return root / ws

    def bad_name(ws: str):
        if not NAME_RE.match(ws):
            return JSONResponse(status_code=400, content={
                "error": f"invalid workspace name {ws!r}"})
        return None

    def thing_path(ws: str, thing_id: str) -> Path:
        return ws_dir(ws) / (quote(thing_id, safe="") + ".json")

    @app.put("/workspaces/{ws}")
    def create_workspace(ws: str):
        if (err := bad_name(ws)) is not None:
            return err
        existed = ws_dir(ws).is_dir()
        ws_dir(ws).mkdir(parents=True, exist_ok=True)
        return JSONResponse(status_code=200 if existed else 201,
                            content={"name": ws})

    @app.get("/workspaces")
    def list_workspaces():
        return sorted(p.name for p in root.iterdir() if p.is_dir())

    @app.delete("/workspaces/{ws}")
    def delete_workspace(ws: str):
        if (err := bad_name(ws)) is not None:
            return err
        directory = ws_dir(ws)
        if not directory.is_dir():
            return JSONResponse(status_code=404, content={"error": "unknown workspace"})
        with lock_for(ws):
            for child in directory.glob("*.json"):
                child.unlink()
            directory.rmdir()
        return Response(status_code=204)

    @app.post("/workspaces/{ws}/things")
    async def add_thing(ws: str, request: Request):
        if (err := bad_name(ws)) is not None:
            return err
        if not ws_dir(ws).is_dir():
            return JSONResponse(status_code=404, content={"error": "unknown workspace"})
        raw = await request.body()
        try:
            td, warnings = parse_td(raw)
        except BlockspeakError as e:
            return JSONResponse(status_code=400,
                                content={"diagnostics": [str(e)]})
        with lock_for(ws):
            path = thing_path(ws, td.id)
            if path.exists():
                return JSONResponse(status_code=409, content={
                    "error": f"thing {td.id!r} already exists"})
            atomic_write_bytes(path, raw)
        location = f"/workspaces/{ws}/things/{quote(td.id, safe='')}"
        return JSONResponse(status_code=201,
                            content={"id": td.id, "warnings": warnings},
                            headers={"Location": location})

    @app.get("/workspaces/{ws}/things")
    def list_things(ws: str):
        directory = ws_dir(ws)
        if not directory.is_dir():
            return JSONResponse(status_code=404, content={"error": "unknown workspace"})
        with lock_for(ws):
            bodies = [p.read_bytes() for p in sorted(directory.glob("*.json"))]
        return Response(content=b"[" + b",".join(bodies) + b"]",
                        media_type="application/json")

    def locate(ws: str, thing_id: str):
        direct = thing_path(ws, thing_id)
        if direct.exists():
            return direct
        # tolerate clients echoing back the percent-encoded Location segment
        decoded = thing_path(ws, unquote(thing_id))
        return decoded if decoded.exists() else None

    @app.get("/workspaces/{ws}/things/{thing_id:path}")
    def get_thing(ws: str, thing_id: str):
        if not ws_dir(ws).is_dir():
            return JSONResponse(status_code=404, content={"error": "unknown workspace"})
        path = locate(ws, thing_id)
        if path is None:
            return JSONResponse(status_code=404, content={"error": "unknown thing"})
        return Response(content=path.read_bytes(), media_type="application/json")

    @app.delete("/workspaces/{ws}/things/{thing_id:path}")
    def delete_thing(ws: str, thing_id: str):
        if not ws_dir(ws).is_dir():
            return JSONResponse(status_code=404, content={"error": "unknown workspace"})
        with lock_for(ws):
            path = locate(ws, thing_id)
            if path is None:
                return JSONResponse(status_code=404, content={"error": "unknown thing"})
            path.unlink()
        return Response(status_code=204)

    return app
