"""Serialized block-program documents (`.blocks.json`).

A document is a tree: top-level blocks for initialization and plans, `inputs`
for value slots, `next` links for statement sequences, and a `mutation` map
carrying hidden per-block data (variadic counts, affordance wiring). A `meta`
member (editor geometry and the like) is preserved opaquely and never
interpreted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ..errors import BlockspeakError

FORMAT_VERSION = 1


class BlockDocumentError(BlockspeakError):
    """The document is not a well-formed block program serialization."""


@dataclass
class Block:
    id: str
    type: str
    fields: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)  # input name -> Block
    next: Optional["Block"] = None
    mutation: dict = field(default_factory=dict)
    meta: Optional[dict] = None

    def iter_tree(self):
        yield self
        for child in self.inputs.values():
            yield from child.iter_tree()
        if self.next is not None:
            yield from self.next.iter_tree()

    def chain(self):
        """This block and its `next` successors, in order."""
        node = self
        while node is not None:
            yield node
            node = node.next


@dataclass
class BlockProgram:
    agent_name: str
    top_blocks: list[Block] = field(default_factory=list)

    def iter_blocks(self):
        for top in self.top_blocks:
            yield from top.iter_tree()


def _parse_block(raw, where: str) -> Block:
    if not isinstance(raw, dict):
        raise BlockDocumentError(f"{where}: block must be an object")
    block_id = raw.get("id")
    type_id = raw.get("type")
    if not isinstance(block_id, str) or not block_id:
        raise BlockDocumentError(f"{where}: block without id")
    if not isinstance(type_id, str) or not type_id:
        raise BlockDocumentError(f"block {block_id!r}: missing type")
    fields = raw.get("fields", {})
    if not isinstance(fields, dict):
        raise BlockDocumentError(f"block {block_id!r}: fields must be an object")
    for name, value in fields.items():
        if not isinstance(value, (str, int, float, bool)):
            raise BlockDocumentError(
                f"block {block_id!r}: field {name!r} must be a scalar")
    inputs_raw = raw.get("inputs", {})
    if not isinstance(inputs_raw, dict):
        raise BlockDocumentError(f"block {block_id!r}: inputs must be an object")
    inputs = {name: _parse_block(child, f"input {name!r} of {block_id!r}")
              for name, child in inputs_raw.items()}
    mutation = raw.get("mutation", {})
    if not isinstance(mutation, dict) or \
            not all(isinstance(v, str) for v in mutation.values()):
        raise BlockDocumentError(
            f"block {block_id!r}: mutation must map names to strings")
    next_raw = raw.get("next")
    next_block = _parse_block(next_raw, f"next of {block_id!r}") \
        if next_raw is not None else None
    meta = raw.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise BlockDocumentError(f"block {block_id!r}: meta must be an object")
    return Block(id=block_id, type=type_id, fields=dict(fields), inputs=inputs,
                 next=next_block, mutation=dict(mutation), meta=meta)


def parse_blocks_document(doc) -> BlockProgram:
    """Decode a `.blocks.json` document (text, bytes or decoded dict)."""
    if isinstance(doc, (str, bytes)):
        try:
            data = json.loads(doc)
        except json.JSONDecodeError as e:
            raise BlockDocumentError(f"not JSON: {e}") from e
    else:
        data = doc
    if not isinstance(data, dict):
        raise BlockDocumentError("document root must be an object")
    if data.get("formatVersion") != FORMAT_VERSION:
        raise BlockDocumentError(
            f"formatVersion must be {FORMAT_VERSION}, got {data.get('formatVersion')!r}")
    agent_name = data.get("agentName")
    if not isinstance(agent_name, str) or not agent_name:
        raise BlockDocumentError("missing agentName")
    tops = data.get("topBlocks", [])
    if not isinstance(tops, list):
        raise BlockDocumentError("topBlocks must be an array")
    return BlockProgram(
        agent_name=agent_name,
        top_blocks=[_parse_block(raw, f"topBlocks[{i}]") for i, raw in enumerate(tops)],
    )


def block_to_json(block: Block) -> dict:
    out: dict = {"id": block.id, "type": block.type}
    if block.fields:
        out["fields"] = dict(block.fields)
    if block.inputs:
        out["inputs"] = {name: block_to_json(child)
                         for name, child in block.inputs.items()}
    if block.mutation:
        out["mutation"] = dict(block.mutation)
    if block.next is not None:
        out["next"] = block_to_json(block.next)
    if block.meta is not None:
        out["meta"] = dict(block.meta)
    return out


def document_to_json(bp: BlockProgram) -> dict:
    return {
        "formatVersion": FORMAT_VERSION,
        "agentName": bp.agent_name,
        "topBlocks": [block_to_json(b) for b in bp.top_blocks],
    }
