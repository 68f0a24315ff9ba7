/**
 * The editing session: canvas contents, connection rules, and the live code
 * preview synced to the runtime service's compile endpoint.
 *
 * The editor never generates agent source itself. The preview pane always
 * shows the last successful compile response or an explicit error banner;
 * it is never allowed to go stale silently.
 */

import { Catalog, type BlockTypeDef, type SlotSpec } from './catalog.js';
import { EditorBlock, documentToJson, documentFromJson, makeIdAllocator } from './document.js';
import type { RuntimeApi } from './api.js';
import type { BlockDocument, Diagnostic } from './types.js';

export interface PreviewState {
  /** last successfully generated source (kept across failures) */
  text: string;
  /** 'current': text matches the canvas; 'error': see banner */
  status: 'current' | 'error' | 'pending' | 'empty';
  banner: string | null;
  diagnostics: Diagnostic[];
}

export type SessionListener = () => void;

export class ConnectionError extends Error {}

export class EditorSession {
  agentName = 'agent';
  tops: EditorBlock[] = [];
  workspace: string | null = null;
  preview: PreviewState = { text: '', status: 'empty', banner: null, diagnostics: [] };

  readonly catalog: Catalog;
  private api: RuntimeApi;
  private listeners: SessionListener[] = [];
  private freshId: () => string;
  private compileEpoch = 0;

  constructor(api: RuntimeApi, catalog: Catalog = new Catalog()) {
    this.api = api;
    this.catalog = catalog;
    this.freshId = makeIdAllocator();
  }

  onChange(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  // -- canvas edits ---------------------------------------------------------

  defOf(block: EditorBlock): BlockTypeDef {
    const def = this.catalog.get(block.type);
    if (!def) throw new ConnectionError(`unknown block type ${block.type}`);
    return def;
  }

  create(typeId: string, fields: Record<string, string | number | boolean> = {}): EditorBlock {
    const def = this.catalog.get(typeId);
    if (!def) throw new ConnectionError(`unknown block type ${typeId}`);
    const block = new EditorBlock(this.freshId(), typeId);
    block.fields = { ...fields };
    if (def.mutationDefaults) block.mutation = { ...def.mutationDefaults };
    return block;
  }

  /** Top level takes initialization and plan blocks only. */
  addTop(block: EditorBlock, position?: { x: number; y: number }): void {
    const def = this.defOf(block);
    if (def.output !== 'top_level') {
      throw new ConnectionError(
        `${def.label} blocks cannot sit directly on the canvas`);
    }
    if (position) block.meta = { ...(block.meta ?? {}), ...position };
    this.tops.push(block);
    this.notify();
  }

  removeTop(block: EditorBlock): void {
    this.tops = this.tops.filter((b) => b !== block);
    this.notify();
  }

  private slotOf(parent: EditorBlock, name: string): SlotSpec {
    const def = this.defOf(parent);
    const slot = this.catalog.slotsFor(def, parent.mutation)
      .find((s) => s.name === name);
    if (!slot) throw new ConnectionError(`${def.label} has no ${name} slot`);
    return slot;
  }

  /** The editor-side snap rule; identical to the server-side type check. */
  canAttach(parent: EditorBlock, slotName: string, child: EditorBlock): boolean {
    try {
      const slot = this.slotOf(parent, slotName);
      return slot.accepts.includes(this.defOf(child).output);
    } catch {
      return false;
    }
  }

  attach(parent: EditorBlock, slotName: string, child: EditorBlock): void {
    const slot = this.slotOf(parent, slotName);
    const childDef = this.defOf(child);
    if (!slot.accepts.includes(childDef.output)) {
      throw new ConnectionError(
        `a ${childDef.label} block does not fit the ${slotName} slot`);
    }
    parent.inputs.set(slotName, child);
    this.notify();
  }

  detach(parent: EditorBlock, slotName: string): EditorBlock | null {
    const child = parent.inputs.get(slotName) ?? null;
    parent.inputs.delete(slotName);
    if (child) this.notify();
    return child;
  }

  /** Statement sequencing (`next` links). */
  chain(before: EditorBlock, after: EditorBlock): void {
    const beforeDef = this.defOf(before);
    const afterDef = this.defOf(after);
    if (!beforeDef.hasNext) {
      throw new ConnectionError(`${beforeDef.label} cannot be followed by another block`);
    }
    if (afterDef.output !== 'statement') {
      throw new ConnectionError(`${afterDef.label} is not an instruction block`);
    }
    before.next = after;
    this.notify();
  }

  setField(block: EditorBlock, name: string, value: string | number | boolean): void {
    block.fields[name] = value;
    this.notify();
  }

  /** Variadic blocks grow/shrink through their mutation count. */
  setVariadicCount(block: EditorBlock, count: number): void {
    const def = this.defOf(block);
    if (!def.variadic) throw new ConnectionError(`${def.label} has no variable arity`);
    block.mutation[def.variadic.countKey] = String(count);
    for (const [name] of block.inputs) {
      const match = name.match(/^([A-Z]+)(\d+)$/);
      if (match && def.variadic.prefixes.includes(match[1]) &&
          parseInt(match[2], 10) >= count) {
        block.inputs.delete(name);
      }
    }
    this.notify();
  }

  // -- persistence -------------------------------------------------------------

  serialize(): BlockDocument {
    return documentToJson(this.agentName, this.tops);
  }

  load(doc: BlockDocument): void {
    const { agentName, tops } = documentFromJson(doc);
    this.agentName = agentName;
    this.tops = tops;
    this.notify();
  }

  clear(): void {
    this.tops = [];
    this.preview = { text: '', status: 'empty', banner: null, diagnostics: [] };
    this.notify();
  }

  // -- live preview ---------------------------------------------------------------

  /** Recompile the canvas. Stale responses (an older in-flight compile
   * finishing after a newer one) are discarded. */
  async refreshPreview(): Promise<PreviewState> {
    const epoch = ++this.compileEpoch;
    if (this.tops.length === 0) {
      this.preview = { text: '', status: 'empty', banner: null, diagnostics: [] };
      this.notify();
      return this.preview;
    }
    this.preview = { ...this.preview, status: 'pending' };
    try {
      const result = await this.api.compile(this.serialize());
      if (epoch !== this.compileEpoch) return this.preview;
      if (result.source !== null) {
        this.preview = { text: result.source, status: 'current',
                         banner: null, diagnostics: result.diagnostics };
      } else {
        this.preview = { text: this.preview.text, status: 'error',
                         banner: 'the program has problems; showing the last good code',
                         diagnostics: result.diagnostics };
      }
    } catch (err) {
      if (epoch !== this.compileEpoch) return this.preview;
      this.preview = { text: this.preview.text, status: 'error',
                       banner: `compile service unreachable: ${String(err)}`,
                       diagnostics: [] };
    }
    this.notify();
    return this.preview;
  }

  get diagnostics(): Diagnostic[] {
    return this.preview.diagnostics;
  }

  get hasErrors(): boolean {
    return this.preview.status === 'error' ||
      this.preview.diagnostics.some((d) => d.severity === 'error');
  }
}
