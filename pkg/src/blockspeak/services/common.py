"""Template compilation and run-configuration expansion, shared verbatim by
the runtime service and the local CLI `run` so the two cannot diverge."""

from __future__ import annotations

import dataclasses

from ..blocks import base_catalog, compile_blocks, parse_blocks_document, validate
from ..errors import BlockspeakError, SourceError
from ..lang import AgentProgram, parse_agent

SOURCE_KINDS = ("blocks", "text")


class TemplateError(BlockspeakError):
    """A template does not compile; `diagnostics` holds JSON-ready dicts."""

    def __init__(self, diagnostics: list[dict]):
        self.diagnostics = diagnostics
        first = diagnostics[0]["message"] if diagnostics else "invalid template"
        super().__init__(first)


class ConfigurationError(BlockspeakError):
    pass


def compile_template(source_kind: str, body, name: str = "agent") -> AgentProgram:
    """Compile a template body (block document or .asl text) or raise
    TemplateError carrying the diagnostics."""
    if source_kind == "blocks":
        try:
            document = parse_blocks_document(body)
        except BlockspeakError as e:
            raise TemplateError([{"severity": "error", "code": "BadDocument",
                                  "message": str(e)}]) from e
        catalog = base_catalog()
        diagnostics = validate(document, catalog)
        errors = [d.to_dict() for d in diagnostics if d.severity == "error"]
        if errors:
            raise TemplateError(errors)
        return compile_blocks(document, catalog)
    if source_kind == "text":
        if not isinstance(body, str):
            raise TemplateError([{"severity": "error", "code": "BadDocument",
                                  "message": "text templates need a string body"}])
        try:
            return parse_agent(body, name=name)
        except SourceError as e:
            raise TemplateError([{
                "severity": "error", "code": type(e).__name__,
                "message": str(e), "line": e.line, "col": e.col,
            }]) from e
    raise TemplateError([{"severity": "error", "code": "BadSourceKind",
                          "message": f"sourceKind must be one of {SOURCE_KINDS}"}])


def check_entries(entries) -> list[dict]:
    """Normalise and validate configuration entries; raises ConfigurationError."""
    if not isinstance(entries, list) or not entries:
        raise ConfigurationError("a configuration needs a non-empty entries array")
    normalised = []
    for i, raw in enumerate(entries):
        if not isinstance(raw, dict) or not isinstance(raw.get("template"), str):
            raise ConfigurationError(f"entries[{i}] needs a template name")
        count = raw.get("count", 1)
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ConfigurationError(f"entries[{i}]: count must be an integer >= 1")
        base = raw.get("baseName") or raw["template"]
        if not isinstance(base, str) or not base:
            raise ConfigurationError(f"entries[{i}]: bad baseName")
        normalised.append({"template": raw["template"], "baseName": base,
                           "count": count})
    expand_entries(normalised)  # raises on duplicate instance names
    return normalised


def expand_entries(entries) -> list[tuple[str, str]]:
    """(instance name, template name) pairs: `base` for count=1, `base_1..n`
    otherwise. Instance names must come out unique."""
    out: list[tuple[str, str]] = []
    for entry in entries:
        base, count = entry["baseName"], entry["count"]
        names = [base] if count == 1 else [f"{base}_{i}" for i in range(1, count + 1)]
        out.extend((n, entry["template"]) for n in names)
    seen = set()
    for name, _ in out:
        if name in seen:
            raise ConfigurationError(f"instance name {name!r} expands more than once")
        seen.add(name)
    return out


def instantiate(programs_by_template: dict[str, AgentProgram],
                entries) -> list[tuple[str, AgentProgram]]:
    """Expansion of a configuration into per-instance named programs."""
    out = []
    for instance, template in expand_entries(entries):
        program = programs_by_template[template]
        out.append((instance, dataclasses.replace(program, name=instance)))
    return out
