/**
 * The block vocabulary the editor offers: the six static categories plus one
 * dynamic category per thing in the selected workspace.
 *
 * Connection typing here mirrors the server-side validator exactly; anything
 * the editor lets you snap together must compile cleanly on the server.
 */

import type { TdForm, ThingDescriptionJson } from './types.js';

export type ConnectionType = 'value' | 'logic_value' | 'statement' | 'top_level';

export interface SlotSpec {
  name: string;
  accepts: ConnectionType[];
  required?: boolean;
  /** a Value plugged here must be literal-shaped (name or fact block) */
  literal?: boolean;
  /** must be a placeholder (variable) block: an output position */
  variable?: boolean;
}

export interface FieldSpec {
  name: string;
  kind: 'text' | 'number' | 'choice' | 'atom' | 'variable';
  choices?: string[];
  placeholder?: string;
}

export interface BlockTypeDef {
  id: string;
  label: string;
  output: ConnectionType;
  fields?: FieldSpec[];
  inputs?: SlotSpec[];
  hasNext?: boolean;
  /** mutation-driven repeated inputs: count key + input name prefixes */
  variadic?: { countKey: string; prefixes: string[] };
  mutationDefaults?: Record<string, string>;
}

export interface PaletteCategory {
  name: string;
  color: string;
  blocks: BlockTypeDef[];
}

const VALUE: ConnectionType[] = ['value'];
const LOGIC_OR_VALUE: ConnectionType[] = ['logic_value', 'value'];
const STATEMENT: ConnectionType[] = ['statement'];

export const TRIGGER_CHOICES = ['believes', 'stops_believing', 'wants'];

// green initialization / brown plans, matching the visual language; the rest
// are this UI's choices
export const CATEGORY_COLORS: Record<string, string> = {
  Values: '#4a7bd0',
  Operations: '#8a55c9',
  Initialization: '#3e9e4f',
  PlanDefinition: '#8d6748',
  AgentActions: '#d07f2f',
  Communication: '#2f9da0',
};
export const THING_COLOR = '#1d7f74';

export function staticCategories(): PaletteCategory[] {
  return [
    {
      name: 'Values',
      color: CATEGORY_COLORS.Values,
      blocks: [
        { id: 'value_atom', label: 'name', output: 'value',
          fields: [{ name: 'NAME', kind: 'atom', placeholder: 'start' }] },
        { id: 'value_string', label: 'text', output: 'value',
          fields: [{ name: 'TEXT', kind: 'text' }] },
        { id: 'value_number', label: 'number', output: 'value',
          fields: [{ name: 'NUM', kind: 'number' }] },
        { id: 'value_boolean', label: 'truth', output: 'value',
          fields: [{ name: 'BOOL', kind: 'choice', choices: ['true', 'false'] }] },
        { id: 'value_variable', label: 'placeholder', output: 'value',
          fields: [{ name: 'NAME', kind: 'variable', placeholder: 'W' }] },
        { id: 'value_empty_list', label: 'empty list', output: 'value' },
        { id: 'value_list_cons', label: 'list starting with', output: 'value',
          inputs: [{ name: 'HEAD', accepts: VALUE },
                   { name: 'TAIL', accepts: VALUE }] },
        { id: 'literal', label: 'fact', output: 'value',
          fields: [{ name: 'FUNCTOR', kind: 'atom', placeholder: 'note' }],
          variadic: { countKey: 'args', prefixes: ['ARG'] } },
      ],
    },
    {
      name: 'Operations',
      color: CATEGORY_COLORS.Operations,
      blocks: [
        { id: 'op_arith', label: 'math', output: 'value',
          fields: [{ name: 'OP', kind: 'choice', choices: ['+', '-', '*', '/'] }],
          inputs: [{ name: 'LEFT', accepts: VALUE },
                   { name: 'RIGHT', accepts: VALUE }] },
        { id: 'op_compare', label: 'compare', output: 'logic_value',
          fields: [{ name: 'OP', kind: 'choice',
                     choices: ['==', '\\==', '<', '<=', '>', '>=', '='] }],
          inputs: [{ name: 'LEFT', accepts: VALUE },
                   { name: 'RIGHT', accepts: VALUE }] },
        { id: 'op_and', label: 'both', output: 'logic_value',
          inputs: [{ name: 'LEFT', accepts: LOGIC_OR_VALUE, literal: true },
                   { name: 'RIGHT', accepts: LOGIC_OR_VALUE, literal: true }] },
        { id: 'op_or', label: 'either', output: 'logic_value',
          inputs: [{ name: 'LEFT', accepts: LOGIC_OR_VALUE, literal: true },
                   { name: 'RIGHT', accepts: LOGIC_OR_VALUE, literal: true }] },
        { id: 'op_not', label: 'it is not the case that', output: 'logic_value',
          inputs: [{ name: 'EXPR', accepts: LOGIC_OR_VALUE, literal: true }] },
      ],
    },
    {
      name: 'Initialization',
      color: CATEGORY_COLORS.Initialization,
      blocks: [
        { id: 'init_belief', label: 'your colleague starts out believing',
          output: 'top_level',
          inputs: [{ name: 'BELIEF', accepts: VALUE, literal: true }] },
        { id: 'init_goal', label: 'your colleague starts out wanting',
          output: 'top_level',
          inputs: [{ name: 'GOAL', accepts: VALUE, literal: true }] },
        { id: 'init_rule', label: 'your colleague concludes ... whenever',
          output: 'top_level',
          inputs: [{ name: 'HEAD', accepts: VALUE, literal: true },
                   { name: 'BODY', accepts: LOGIC_OR_VALUE, literal: true }] },
      ],
    },
    {
      name: 'PlanDefinition',
      color: CATEGORY_COLORS.PlanDefinition,
      blocks: [
        { id: 'plan', label: 'when your colleague ...', output: 'top_level',
          fields: [{ name: 'TRIGGER_KIND', kind: 'choice', choices: TRIGGER_CHOICES }],
          inputs: [{ name: 'TRIGGER', accepts: VALUE, literal: true },
                   { name: 'CONTEXT', accepts: LOGIC_OR_VALUE,
                     required: false, literal: true },
                   { name: 'BODY', accepts: STATEMENT, required: false }] },
      ],
    },
    {
      name: 'AgentActions',
      color: CATEGORY_COLORS.AgentActions,
      blocks: [
        { id: 'act_add_belief', label: 'start believing', output: 'statement',
          inputs: [{ name: 'BELIEF', accepts: VALUE, literal: true }], hasNext: true },
        { id: 'act_remove_belief', label: 'stop believing', output: 'statement',
          inputs: [{ name: 'BELIEF', accepts: VALUE, literal: true }], hasNext: true },
        { id: 'act_achieve', label: 'start wanting', output: 'statement',
          inputs: [{ name: 'GOAL', accepts: VALUE, literal: true }], hasNext: true },
        { id: 'act_print', label: 'write to the log', output: 'statement',
          inputs: [{ name: 'VALUE', accepts: VALUE }], hasNext: true },
        { id: 'act_wait', label: 'wait (milliseconds)', output: 'statement',
          inputs: [{ name: 'TIME', accepts: VALUE }], hasNext: true },
        { id: 'act_json_get', label: 'pick out of a document', output: 'statement',
          inputs: [{ name: 'DOC', accepts: VALUE },
                   { name: 'PATH', accepts: VALUE },
                   { name: 'OUT', accepts: VALUE, variable: true }], hasNext: true },
        { id: 'act_json_build', label: 'assemble a document', output: 'statement',
          variadic: { countKey: 'pairs', prefixes: ['KEY', 'VAL'] },
          inputs: [{ name: 'OUT', accepts: VALUE, variable: true }], hasNext: true },
      ],
    },
    {
      name: 'Communication',
      color: CATEGORY_COLORS.Communication,
      blocks: [
        { id: 'comm_tell', label: 'tell a colleague about', output: 'statement',
          inputs: [{ name: 'RECEIVER', accepts: VALUE },
                   { name: 'BELIEF', accepts: VALUE, literal: true }], hasNext: true },
        { id: 'comm_achieve', label: 'ask a colleague to achieve', output: 'statement',
          inputs: [{ name: 'RECEIVER', accepts: VALUE },
                   { name: 'GOAL', accepts: VALUE, literal: true }], hasNext: true },
      ],
    },
  ];
}

// --- dynamic thing categories -------------------------------------------------

const DEFAULT_METHODS: Record<string, string> = {
  readproperty: 'GET',
  writeproperty: 'PUT',
  invokeaction: 'POST',
};

function slug(text: string): string {
  let s = text.toLowerCase().replace(/[^a-z0-9_]+/g, '_').replace(/^_+|_+$/g, '');
  if (!s || !/^[a-z]/.test(s)) s = 't_' + s;
  return s;
}

export function resolveHref(href: string, base?: string): string {
  if (/^https?:\/\//.test(href)) return href;
  if (!base) return href;
  return new URL(href, base).toString();
}

export function pickForm(forms: TdForm[] | undefined, op: string): TdForm | null {
  for (const f of forms ?? []) {
    const ops = typeof f.op === 'string' ? [f.op] : f.op;
    if (!ops || ops.length === 0 || ops.includes(op)) return f;
  }
  return null;
}

export function formMethod(form: TdForm, op: string): string {
  return form['htv:methodName'] ?? DEFAULT_METHODS[op];
}

function wiring(td: ThingDescriptionJson, form: TdForm, op: string): Record<string, string> {
  return {
    href: resolveHref(form.href, td.base),
    httpMethod: formMethod(form, op),
    affordanceKind: op,
    thingId: td.id,
  };
}

/**
 * One palette category per thing: a read block per property, a write block
 * per writable property, an invoke block per action (with one value input
 * per declared input field).
 */
export function thingCategory(td: ThingDescriptionJson): PaletteCategory {
  const thing = slug(td.id);
  const blocks: BlockTypeDef[] = [];
  for (const [name, prop] of Object.entries(td.properties ?? {})) {
    const readForm = pickForm(prop.forms, 'readproperty');
    if (!readForm) continue;
    blocks.push({
      id: `thing_${thing}_read_${slug(name)}`,
      label: `read '${name}' of ${td.title} into`,
      output: 'statement',
      inputs: [{ name: 'OUT', accepts: VALUE, variable: true }],
      hasNext: true,
      mutationDefaults: wiring(td, readForm, 'readproperty'),
    });
    if (prop.readOnly) continue;
    const writeForm = pickForm(prop.forms, 'writeproperty');
    if (!writeForm) continue;
    blocks.push({
      id: `thing_${thing}_write_${slug(name)}`,
      label: `set '${name}' of ${td.title} to`,
      output: 'statement',
      inputs: [{ name: 'VALUE', accepts: VALUE }],
      hasNext: true,
      mutationDefaults: wiring(td, writeForm, 'writeproperty'),
    });
  }
  for (const [name, action] of Object.entries(td.actions ?? {})) {
    const form = pickForm(action.forms, 'invokeaction');
    if (!form) continue;
    let inputs: SlotSpec[] = [];
    if (action.input?.type === 'object') {
      inputs = Object.keys(action.input.properties ?? {})
        .map((field) => ({ name: field, accepts: VALUE }));
    } else if (action.input?.type) {
      inputs = [{ name: 'PAYLOAD', accepts: VALUE }];
    }
    blocks.push({
      id: `thing_${thing}_invoke_${slug(name)}`,
      label: `ask ${td.title} to '${name}'`,
      output: 'statement',
      inputs,
      hasNext: true,
      mutationDefaults: wiring(td, form, 'invokeaction'),
    });
  }
  return { name: td.title, color: THING_COLOR, blocks };
}

export class Catalog {
  readonly categories: PaletteCategory[];
  private byId = new Map<string, BlockTypeDef>();

  constructor(thingTds: ThingDescriptionJson[] = []) {
    this.categories = [...staticCategories(), ...thingTds.map(thingCategory)];
    for (const cat of this.categories) {
      for (const block of cat.blocks) this.byId.set(block.id, block);
    }
  }

  get(typeId: string): BlockTypeDef | undefined {
    return this.byId.get(typeId);
  }

  /** Declared plus variadic slots for a concrete block instance. */
  slotsFor(def: BlockTypeDef, mutation: Record<string, string>): SlotSpec[] {
    const slots = [...(def.inputs ?? [])];
    if (def.variadic) {
      const count = parseInt(mutation[def.variadic.countKey] ?? '0', 10) || 0;
      for (let i = 0; i < count; i++) {
        for (const prefix of def.variadic.prefixes) {
          slots.push({ name: `${prefix}${i}`, accepts: VALUE });
        }
      }
    }
    return slots;
  }
}
