"""W3C Thing Description parsing (subset).

Keeps exactly what the rest of the system needs: interaction affordances with
resolvable forms, value/input shape descriptors and a security gate. Parsing
is total over arbitrary JSON: anything unusable becomes a warning or a TdError,
never a crash.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional
from urllib.parse import urljoin, urlparse

from ..errors import BlockspeakError


class TdError(BlockspeakError):
    """Document cannot be accepted as a Thing Description."""


DEFAULT_METHODS = {
    "readproperty": "GET",
    "writeproperty": "PUT",
    "invokeaction": "POST",
}

_SCHEMA_TYPES = {"object", "number", "string", "boolean", "array"}


@dataclass(frozen=True)
class Form:
    href: str
    method: Optional[str] = None  # None: defaulted per operation at use
    content_type: str = "application/json"
    ops: tuple[str, ...] = ()

    def method_for(self, op: str) -> str:
        return self.method or DEFAULT_METHODS[op]


@dataclass
class PropertyAffordance:
    name: str
    forms: list[Form]
    writable: bool = True
    value_type: Optional[str] = None

    def form_for(self, op: str) -> Optional[Form]:
        return _pick_form(self.forms, op)


@dataclass
class ActionAffordance:
    name: str
    forms: list[Form]
    input_type: Optional[str] = None  # "object" or a scalar type name
    input_fields: tuple[tuple[str, Optional[str]], ...] = ()

    def form_for(self, op: str = "invokeaction") -> Optional[Form]:
        return _pick_form(self.forms, op)


@dataclass
class EventAffordance:
    name: str
    forms: list[Form]


@dataclass
class ThingDescription:
    id: str
    title: str
    base: Optional[str] = None
    properties: dict[str, PropertyAffordance] = field(default_factory=dict)
    actions: dict[str, ActionAffordance] = field(default_factory=dict)
    events: dict[str, EventAffordance] = field(default_factory=dict)
    security_ok: bool = True


def _pick_form(forms, op: str) -> Optional[Form]:
    for f in forms:
        if not f.ops or op in f.ops:
            return f
    return None


def _is_absolute(href: str) -> bool:
    parsed = urlparse(href)
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


def parse_td(doc) -> tuple[ThingDescription, list[str]]:
    """Parse a TD document (text, bytes or already-decoded dict).

    Returns the description plus a list of warning strings. Raises TdError
    for non-JSON input, a missing title, or a missing id.
    """
    if isinstance(doc, (str, bytes)):
        try:
            data = json.loads(doc)
        except json.JSONDecodeError as e:
            raise TdError(f"not JSON: {e}") from e
    else:
        data = doc
    if not isinstance(data, dict):
        raise TdError("a Thing Description must be a JSON object")
    title = data.get("title")
    if not isinstance(title, str) or not title:
        raise TdError("missing title")
    td_id = data.get("id")
    if not isinstance(td_id, str) or not td_id:
        raise TdError("missing id")

    warnings: list[str] = []
    base = data.get("base") if isinstance(data.get("base"), str) else None
    td = ThingDescription(id=td_id, title=title, base=base)

    td.security_ok = _check_security(data, warnings)

    for name, raw in _items(data.get("properties")):
        forms = _parse_forms(raw, base, warnings, f"property {name!r}")
        if not forms:
            warnings.append(f"property {name!r} has no usable form; dropped")
            continue
        td.properties[name] = PropertyAffordance(
            name=name,
            forms=forms,
            writable=not bool(raw.get("readOnly", False)),
            value_type=_schema_type(raw),
        )

    for name, raw in _items(data.get("actions")):
        forms = _parse_forms(raw, base, warnings, f"action {name!r}")
        if not forms:
            warnings.append(f"action {name!r} has no usable form; dropped")
            continue
        input_type, fields = _parse_input(raw.get("input"))
        td.actions[name] = ActionAffordance(
            name=name, forms=forms, input_type=input_type, input_fields=fields)

    for name, raw in _items(data.get("events")):
        forms = _parse_forms(raw, base, warnings, f"event {name!r}")
        if not forms:
            warnings.append(f"event {name!r} has no usable form; dropped")
            continue
        td.events[name] = EventAffordance(name=name, forms=forms)

    return td, warnings


def _items(member):
    if isinstance(member, dict):
        for name, raw in member.items():
            if isinstance(raw, dict):
                yield name, raw


def _parse_forms(raw, base, warnings, what) -> list[Form]:
    forms = []
    for entry in raw.get("forms", []) or []:
        if not isinstance(entry, dict):
            continue
        href = entry.get("href")
        if not isinstance(href, str) or not href:
            warnings.append(f"{what}: form without href ignored")
            continue
        resolved = urljoin(base, href) if base else href
        if not _is_absolute(resolved):
            warnings.append(f"{what}: form href {href!r} does not resolve to an "
                            "absolute http(s) URL; ignored")
            continue
        ops = entry.get("op", ())
        if isinstance(ops, str):
            ops = (ops,)
        elif isinstance(ops, list):
            ops = tuple(o for o in ops if isinstance(o, str))
        else:
            ops = ()
        forms.append(Form(
            href=resolved,
            method=entry.get("htv:methodName"),
            content_type=entry.get("contentType", "application/json"),
            ops=ops,
        ))
    return forms


def _schema_type(raw) -> Optional[str]:
    t = raw.get("type")
    if t == "integer":
        return "number"
    return t if t in _SCHEMA_TYPES else None


def _parse_input(raw):
    if not isinstance(raw, dict):
        return None, ()
    t = raw.get("type")
    if t == "object":
        fields = []
        props = raw.get("properties")
        if isinstance(props, dict):
            for fname, fraw in props.items():
                ftype = _schema_type(fraw) if isinstance(fraw, dict) else None
                fields.append((fname, ftype))
        return "object", tuple(fields)
    if t == "integer":
        t = "number"
    return (t if t in _SCHEMA_TYPES else None), ()


def _check_security(data, warnings) -> bool:
    definitions = data.get("securityDefinitions")
    applied = data.get("security")
    if definitions is None and applied is None:
        return True
    names: list[str] = []
    if isinstance(applied, str):
        names = [applied]
    elif isinstance(applied, list):
        names = [n for n in applied if isinstance(n, str)]
    schemes = []
    for n in names:
        d = definitions.get(n) if isinstance(definitions, dict) else None
        schemes.append(d.get("scheme") if isinstance(d, dict) else None)
    if all(s == "nosec" for s in schemes) and schemes:
        return True
    warnings.append("only the 'nosec' security scheme is supported; affordances "
                    "are listed but runtime invocation is refused")
    return False
