"""Internal actions (.send, .print, .wait, .json_get, .json_build) and the
JSON <-> term mapping used by them and by the WoT dispatcher.

The term language stays small on purpose: JSON objects are never reified as
structures; they travel as JSON text strings and get picked apart with
`.json_get` paths.
"""

from __future__ import annotations

import json
import time

from ..errors import BlockspeakError
from ..lang import (
    Atom,
    ListTerm,
    Literal,
    Num,
    Str,
    Structure,
    Term,
    Var,
    is_ground,
    print_term,
)

COMPACT = {"separators": (",", ":")}


class StepFailure(BlockspeakError):
    """A body step could not be carried out; the whole intention is dropped."""


def json_to_term(value) -> Term:
    if value is True:
        return Atom("true")
    if value is False:
        return Atom("false")
    if value is None:
        return Atom("null")
    if isinstance(value, (int, float)):
        return Num(float(value))
    if isinstance(value, str):
        return Str(value)
    if isinstance(value, list):
        return ListTerm(tuple(json_to_term(v) for v in value))
    # objects stay opaque: address their innards via json_get paths
    return Str(json.dumps(value, **COMPACT))


def term_to_json(t: Term):
    if isinstance(t, Atom):
        if t.name == "true":
            return True
        if t.name == "false":
            return False
        if t.name == "null":
            return None
        return t.name
    if isinstance(t, Num):
        return int(t.value) if t.value.is_integer() else t.value
    if isinstance(t, Str):
        return t.text
    if isinstance(t, ListTerm):
        return [term_to_json(x) for x in t.items]
    raise StepFailure(f"cannot express {print_term(t)} as JSON")


def render(t: Term) -> str:
    """Human rendering for .print: strings lose their quotes."""
    return t.text if isinstance(t, Str) else print_term(t)


def run_internal(agent, intention, frame, name: str, args: tuple[Term, ...],
                 raw_args: tuple[Term, ...]) -> None:
    """Execute one internal action. `args` carry the intention's bindings
    already applied; `raw_args` are the plan's original terms (used to find
    output-variable names)."""
    if name == "send":
        _do_send(agent, args)
    elif name == "print":
        agent.log_info(" ".join(render(a) for a in args))
    elif name == "wait":
        _do_wait(intention, args)
    elif name == "json_get":
        _do_json_get(frame, args)
    elif name == "json_build":
        _do_json_build(frame, args)
    else:
        raise StepFailure(f"unknown internal action .{name}")


def _do_send(agent, args) -> None:
    from .container import Message, UnknownReceiverError

    if len(args) != 3:
        raise StepFailure(".send takes (receiver, performative, content)")
    receiver, performative, content = args
    if isinstance(receiver, Atom):
        receiver_name = receiver.name
    elif isinstance(receiver, Str):
        receiver_name = receiver.text
    else:
        raise StepFailure(f"bad receiver {print_term(receiver)}")
    if not isinstance(performative, Atom) or performative.name not in ("tell", "achieve"):
        raise StepFailure("performative must be tell or achieve")
    if not isinstance(content, (Atom, Structure)):
        raise StepFailure(f"message content must be a predicate, got {print_term(content)}")
    lit = Literal.from_term(content)
    if not is_ground(lit):
        raise StepFailure(f"message content must be ground: {print_term(content)}")
    try:
        agent.container.send(Message(agent.name, receiver_name,
                                     performative.name, lit))
    except UnknownReceiverError as e:
        raise StepFailure(str(e)) from e


def _do_wait(intention, args) -> None:
    if len(args) != 1 or not isinstance(args[0], Num) or args[0].value < 0:
        raise StepFailure(".wait takes one non-negative number of milliseconds")
    intention.wake_at = time.monotonic() + args[0].value / 1000.0


def _out_var(frame, args, action: str) -> Var:
    out = args[-1]
    if not isinstance(out, Var):
        raise StepFailure(f"the last argument of .{action} must be an unbound variable")
    if out.name in frame.bindings:
        raise StepFailure(f"output variable {out.name} is already bound")
    return out


def _do_json_get(frame, args) -> None:
    if len(args) != 3:
        raise StepFailure(".json_get takes (document, path, Out)")
    doc, path, _ = args
    out = _out_var(frame, args, "json_get")
    if not isinstance(doc, Str):
        raise StepFailure("the document argument of .json_get must be a string")
    if not isinstance(path, Str):
        raise StepFailure("the path argument of .json_get must be a string")
    try:
        value = json.loads(doc.text)
    except ValueError as e:
        raise StepFailure(f".json_get document is not JSON: {e}") from e
    for segment in path.text.split(".") if path.text else []:
        if isinstance(value, dict) and segment in value:
            value = value[segment]
        elif isinstance(value, list) and segment.isdigit() and int(segment) < len(value):
            value = value[int(segment)]
        else:
            raise StepFailure(f"path {path.text!r} not present in document")
    frame.bindings[out.name] = json_to_term(value)


def _do_json_build(frame, args) -> None:
    if len(args) % 2 == 0 or len(args) < 1:
        raise StepFailure(".json_build takes key/value pairs plus an output variable")
    out = _out_var(frame, args, "json_build")
    obj = {}
    pairs = args[:-1]
    for key, value in zip(pairs[0::2], pairs[1::2]):
        if isinstance(key, Str):
            key_name = key.text
        elif isinstance(key, Atom):
            key_name = key.name
        else:
            raise StepFailure(f"JSON keys must be names or strings, got {print_term(key)}")
        obj[key_name] = term_to_json(value)
    frame.bindings[out.name] = Str(json.dumps(obj, **COMPACT))
