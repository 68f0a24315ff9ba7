"""Command line: compile and check agent sources, run a MAS locally, serve
the runtime/TD-repository services, validate TDs.

Exit codes: 0 ok, 1 diagnostics, 2 I/O trouble, 3 network trouble.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import threading
from pathlib import Path

from .errors import BlockspeakError, SourceError
from .lang import parse_agent, print_agent
from .runtime import RunLog, WotActionDispatcher, run_mas
from .services.common import (
    ConfigurationError,
    TemplateError,
    check_entries,
    compile_template,
    instantiate,
)
from .wot.td import parse_td

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_IO = 2
EXIT_NETWORK = 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as e:
        raise SystemExit(_fail(f"cannot read {path}: {e}", EXIT_IO))


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _print_diagnostics(diagnostics) -> None:
    for d in diagnostics:
        where = f" [{d['blockId']}]" if d.get("blockId") else ""
        line = f":{d['line']}:{d['col']}" if d.get("line") else ""
        print(f"{d.get('severity', 'error')}{line}: {d['message']}{where}",
              file=sys.stderr)


def cmd_compile(args) -> int:
    text = _read(args.input)
    try:
        program = compile_template("blocks", text,
                                   name=Path(args.input).stem.split(".")[0])
    except TemplateError as e:
        _print_diagnostics(e.diagnostics)
        return EXIT_DIAGNOSTICS
    source = print_agent(program)
    if args.output:
        try:
            Path(args.output).write_text(source, "utf-8")
        except OSError as e:
            return _fail(f"cannot write {args.output}: {e}", EXIT_IO)
    else:
        sys.stdout.write(source)
    return EXIT_OK


def cmd_check(args) -> int:
    text = _read(args.input)
    if args.input.endswith(".blocks.json"):
        try:
            compile_template("blocks", text)
        except TemplateError as e:
            _print_diagnostics(e.diagnostics)
            return EXIT_DIAGNOSTICS
    else:
        try:
            parse_agent(text, name="agent")
        except SourceError as e:
            print(f"error:{e.line}:{e.col}: {e}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
    print("ok")
    return EXIT_OK


def _load_local_template(base_dir: Path, ref: str):
    path = (base_dir / ref).resolve() if not Path(ref).is_absolute() else Path(ref)
    text = _read(str(path))
    kind = "blocks" if path.name.endswith(".blocks.json") else "text"
    stem = path.name.split(".")[0]
    return stem, compile_template(kind, text, name=stem)


def cmd_run(args) -> int:
    raw = _read(args.config)
    try:
        config = json.loads(raw)
    except ValueError as e:
        return _fail(f"{args.config} is not JSON: {e}", EXIT_IO)
    base_dir = Path(args.config).resolve().parent
    entries = config.get("entries")
    if not isinstance(entries, list):
        return _fail("run configuration needs an entries array", EXIT_DIAGNOSTICS)
    # local entries reference template files; default instance base = file stem
    programs_by_template = {}
    for entry in entries:
        if not isinstance(entry, dict) or not isinstance(entry.get("template"), str):
            return _fail("every entry needs a template path", EXIT_DIAGNOSTICS)
        try:
            stem, program = _load_local_template(base_dir, entry["template"])
        except TemplateError as e:
            _print_diagnostics(e.diagnostics)
            return EXIT_DIAGNOSTICS
        entry.setdefault("baseName", stem)
        programs_by_template[entry["template"]] = program
    try:
        entries = check_entries(entries)
    except ConfigurationError as e:
        return _fail(str(e), EXIT_DIAGNOSTICS)
    programs = instantiate(programs_by_template, entries)

    log = RunLog("local", sink=print)
    handle = run_mas(programs, dispatcher=WotActionDispatcher(),
                     run_id="local", log=log,
                     max_cycle_rate=args.max_rate)
    stop_requested = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop_requested.set())
    try:
        while not stop_requested.is_set():
            stop_requested.wait(0.2)
    finally:
        handle.stop()
    print("stopped.", file=sys.stderr)
    return EXIT_OK


def _parse_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not port.isdigit():
        raise SystemExit(_fail(f"bad address {addr!r} (want host:port)", EXIT_IO))
    return host or "127.0.0.1", int(port)


def cmd_serve(args) -> int:
    import uvicorn

    if args.service == "runtime":
        from .services import create_runtime_app

        addr = args.addr or os.environ.get("RUNTIME_ADDR", "127.0.0.1:8080")
        data = args.data or os.environ.get("RUNTIME_DATA", "data")
        max_runs = args.max_runs or int(os.environ.get("RUNTIME_MAX_RUNS", "8"))
        td_repo = args.td_repo or os.environ.get("TDREPO_URL")
        app = create_runtime_app(data, td_repo_url=td_repo, max_runs=max_runs)
    else:
        from .services import create_tdrepo_app

        addr = args.addr or os.environ.get("TDREPO_ADDR", "127.0.0.1:8081")
        data = args.data or os.environ.get("TDREPO_DATA", "data")
        app = create_tdrepo_app(data)
    host, port = _parse_addr(addr)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def cmd_td_validate(args) -> int:
    text = _read(args.input)
    try:
        td, warnings = parse_td(text)
    except BlockspeakError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"ok: {td.title!r} with {len(td.properties)} propert"
          f"{'y' if len(td.properties) == 1 else 'ies'}, "
          f"{len(td.actions)} action(s), {len(td.events)} event(s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockspeak",
        description="Block-language agent compiler, runtime and WoT tooling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a .blocks.json document to agent source")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("check", help="validate a blocks document or parse agent source")
    p.add_argument("input")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("run", help="run a MAS locally from a configuration file")
    p.add_argument("config")
    p.add_argument("--td-repo", help="TD repository URL")
    p.add_argument("--max-rate", type=float, default=1000.0,
                   help="max reasoning cycles per second per agent")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("serve", help="start a service")
    p.add_argument("service", choices=["runtime", "tdrepo"])
    p.add_argument("--addr", help="host:port to listen on")
    p.add_argument("--data", help="data directory")
    p.add_argument("--max-runs", type=int)
    p.add_argument("--td-repo", help="TD repository URL (runtime only)")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("td", help="Thing Description tools")
    td_sub = p.add_subparsers(dest="td_command", required=True)
    v = td_sub.add_parser("validate", help="validate a TD document")
    v.add_argument("input")
    v.set_defaults(fn=cmd_td_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_IO
    except ConnectionError:
        return EXIT_NETWORK
    except BlockspeakError as e:
        return _fail(str(e), EXIT_DIAGNOSTICS)


if __name__ == "__main__":
    sys.exit(main())
