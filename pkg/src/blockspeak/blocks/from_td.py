"""Dynamic block categories generated from Thing Descriptions.

Per property one read block (plus one write block when writable), per action
one invoke block with a value input per declared input field. The affordance
wiring (href, HTTP method, kind, thing id) rides along as mutation defaults so
the editor never has to show it.
"""

from __future__ import annotations

import re

from ..wot.td import ThingDescription
from .catalog import (
    AFFORDANCE_MUTATION_KEYS,
    BlockType,
    Category,
    ConnectionType,
    SlotSpec,
    VALUE_ONLY,
)
from .compiler import Diagnostic

_SLUG_RE = re.compile(r"[^a-z0-9_]+")


def _slug(text: str) -> str:
    slug = _SLUG_RE.sub("_", text.lower()).strip("_")
    if not slug or not slug[0].isalpha():
        slug = "t_" + slug
    return slug


def _wiring(td: ThingDescription, form, kind: str) -> dict:
    return {
        "href": form.href,
        "httpMethod": form.method_for(kind),
        "affordanceKind": kind,
        "thingId": td.id,
    }


def blocks_from_td(td: ThingDescription) -> tuple[Category, list[Diagnostic]]:
    """One dynamic category (named after the thing) of affordance blocks."""
    warnings: list[Diagnostic] = []
    blocks: list[BlockType] = []
    thing = _slug(td.id)

    def warn(message: str) -> None:
        warnings.append(Diagnostic("warning", "UnusableAffordance", message))

    for name, prop in td.properties.items():
        read_form = prop.form_for("readproperty")
        if read_form is None:
            warn(f"property {name!r} of {td.title!r} has no readable form; "
                 "no blocks generated")
            continue
        blocks.append(BlockType(
            id=f"thing_{thing}_read_{_slug(name)}",
            role="affordance_read",
            label=f"read '{name}' of {td.title} into",
            output=ConnectionType.STATEMENT,
            inputs=(SlotSpec("OUT", VALUE_ONLY, variable=True),),
            has_next=True,
            mutation_keys=AFFORDANCE_MUTATION_KEYS,
            mutation_defaults=_wiring(td, read_form, "readproperty"),
        ))
        if prop.writable:
            write_form = prop.form_for("writeproperty")
            if write_form is None:
                warn(f"property {name!r} of {td.title!r} is writable but has "
                     "no write form; write block omitted")
                continue
            blocks.append(BlockType(
                id=f"thing_{thing}_write_{_slug(name)}",
                role="affordance_write",
                label=f"set '{name}' of {td.title} to",
                output=ConnectionType.STATEMENT,
                inputs=(SlotSpec("VALUE", VALUE_ONLY),),
                has_next=True,
                mutation_keys=AFFORDANCE_MUTATION_KEYS,
                mutation_defaults=_wiring(td, write_form, "writeproperty"),
            ))

    for name, action in td.actions.items():
        form = action.form_for()
        if form is None:
            warn(f"action {name!r} of {td.title!r} has no usable form; "
                 "no block generated")
            continue
        if action.input_type == "object":
            inputs = tuple(SlotSpec(field_name, VALUE_ONLY)
                           for field_name, _ in action.input_fields)
        elif action.input_type is not None:
            inputs = (SlotSpec("PAYLOAD", VALUE_ONLY),)
        else:
            inputs = ()
        blocks.append(BlockType(
            id=f"thing_{thing}_invoke_{_slug(name)}",
            role="affordance_invoke",
            label=f"ask {td.title} to '{name}'",
            output=ConnectionType.STATEMENT,
            inputs=inputs,
            has_next=True,
            mutation_keys=AFFORDANCE_MUTATION_KEYS,
            mutation_defaults=_wiring(td, form, "invokeaction"),
        ))

    return Category(td.title, tuple(blocks)), warnings
