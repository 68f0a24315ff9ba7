/**
 * The canvas-side block model and its (de)serialization to `.blocks.json`.
 *
 * Geometry lives under each block's `meta` key; the compiler ignores it, so
 * a canvas saved and reloaded reproduces an identical document.
 */

import type { BlockDocument, BlockJson, FieldValue } from './types.js';
import { FORMAT_VERSION } from './types.js';

export class EditorBlock {
  id: string;
  type: string;
  fields: Record<string, FieldValue> = {};
  inputs: Map<string, EditorBlock> = new Map();
  mutation: Record<string, string> = {};
  next: EditorBlock | null = null;
  meta: Record<string, unknown> | null = null;

  constructor(id: string, type: string) {
    this.id = id;
    this.type = type;
  }

  *walk(): Generator<EditorBlock> {
    yield this;
    for (const child of this.inputs.values()) yield* child.walk();
    if (this.next) yield* this.next.walk();
  }

  toJson(): BlockJson {
    const out: BlockJson = { id: this.id, type: this.type };
    if (Object.keys(this.fields).length) out.fields = { ...this.fields };
    if (this.inputs.size) {
      out.inputs = {};
      for (const [name, child] of this.inputs) out.inputs[name] = child.toJson();
    }
    if (Object.keys(this.mutation).length) out.mutation = { ...this.mutation };
    if (this.next) out.next = this.next.toJson();
    if (this.meta) out.meta = { ...this.meta };
    return out;
  }

  static fromJson(json: BlockJson): EditorBlock {
    const block = new EditorBlock(json.id, json.type);
    block.fields = { ...(json.fields ?? {}) };
    block.mutation = { ...(json.mutation ?? {}) };
    for (const [name, child] of Object.entries(json.inputs ?? {})) {
      block.inputs.set(name, EditorBlock.fromJson(child));
    }
    block.next = json.next ? EditorBlock.fromJson(json.next) : null;
    block.meta = json.meta ? { ...json.meta } : null;
    return block;
  }
}

export function makeIdAllocator(prefix = 'b'): () => string {
  let counter = 0;
  return () => `${prefix}${++counter}`;
}

export function documentToJson(agentName: string, tops: EditorBlock[]): BlockDocument {
  return {
    formatVersion: FORMAT_VERSION,
    agentName,
    topBlocks: tops.map((b) => b.toJson()),
  };
}

export function documentFromJson(doc: BlockDocument): {
  agentName: string;
  tops: EditorBlock[];
} {
  if (doc.formatVersion !== FORMAT_VERSION) {
    throw new Error(`unsupported formatVersion ${doc.formatVersion}`);
  }
  return {
    agentName: doc.agentName,
    tops: (doc.topBlocks ?? []).map(EditorBlock.fromJson),
  };
}
