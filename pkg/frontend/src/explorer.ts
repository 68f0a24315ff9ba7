/**
 * The thing explorer: forms and buttons generated from a Thing Description
 * so affordances can be exercised by hand, with responses shown as JSON.
 *
 * Requests go straight to the target carried by each form (never a guessed
 * endpoint). After an action invocation every property is re-read so the
 * displayed state stays truthful.
 */

import { formMethod, pickForm, resolveHref } from './catalog.js';
import { invokeForm, type FetchLike } from './api.js';
import type { ThingDescriptionJson } from './types.js';

export interface PropertyView {
  name: string;
  schemaType: string | null;
  writable: boolean;
  /** pretty-printed JSON of the last read, or null before the first read */
  value: string | null;
  busy: boolean;
  error: string | null;
}

export interface ActionInputField {
  name: string;
  schemaType: string | null;
}

export interface ActionView {
  name: string;
  inputs: ActionInputField[];
  lastResult: string | null;
  busy: boolean;
  error: string | null;
}

export interface EventView {
  name: string; // displayed only; subscription is out of scope
}

function pretty(value: unknown): string {
  return JSON.stringify(value, null, 2) ?? 'null';
}

export class ThingExplorer {
  readonly title: string;
  readonly properties: PropertyView[] = [];
  readonly actions: ActionView[] = [];
  readonly events: EventView[] = [];

  constructor(private td: ThingDescriptionJson, private fetchImpl: FetchLike = fetch) {
    this.title = td.title;
    for (const [name, prop] of Object.entries(td.properties ?? {})) {
      if (!pickForm(prop.forms, 'readproperty')) continue;
      this.properties.push({
        name,
        schemaType: prop.type ?? null,
        writable: !prop.readOnly,
        value: null,
        busy: false,
        error: null,
      });
    }
    for (const [name, action] of Object.entries(td.actions ?? {})) {
      if (!pickForm(action.forms, 'invokeaction')) continue;
      let inputs: ActionInputField[] = [];
      if (action.input?.type === 'object') {
        inputs = Object.entries(action.input.properties ?? {})
          .map(([field, schema]) => ({ name: field, schemaType: schema.type ?? null }));
      } else if (action.input?.type) {
        inputs = [{ name: 'value', schemaType: action.input.type }];
      }
      this.actions.push({ name, inputs, lastResult: null, busy: false, error: null });
    }
    for (const name of Object.keys(td.events ?? {})) {
      this.events.push({ name });
    }
  }

  property(name: string): PropertyView {
    const view = this.properties.find((p) => p.name === name);
    if (!view) throw new Error(`no property ${name}`);
    return view;
  }

  action(name: string): ActionView {
    const view = this.actions.find((a) => a.name === name);
    if (!view) throw new Error(`no action ${name}`);
    return view;
  }

  async readProperty(name: string): Promise<PropertyView> {
    const view = this.property(name);
    const form = pickForm(this.td.properties?.[name]?.forms, 'readproperty')!;
    view.busy = true;
    try {
      const result = await invokeForm(
        resolveHref(form.href, this.td.base),
        formMethod(form, 'readproperty'), undefined, this.fetchImpl);
      view.value = pretty(result);
      view.error = null;
    } catch (err) {
      view.error = String(err); // the form stays usable
    } finally {
      view.busy = false;
    }
    return view;
  }

  async writeProperty(name: string, raw: string): Promise<PropertyView> {
    const view = this.property(name);
    const form = pickForm(this.td.properties?.[name]?.forms, 'writeproperty');
    if (!form) {
      view.error = `property ${name} has no write form`;
      return view;
    }
    let payload: unknown;
    try {
      payload = JSON.parse(raw);
    } catch {
      payload = raw; // plain text becomes a JSON string
    }
    view.busy = true;
    try {
      await invokeForm(resolveHref(form.href, this.td.base),
                       formMethod(form, 'writeproperty'), payload, this.fetchImpl);
      view.error = null;
    } catch (err) {
      view.error = String(err);
    } finally {
      view.busy = false;
    }
    return this.readProperty(name);
  }

  async invokeAction(name: string, inputs: Record<string, string> = {}): Promise<ActionView> {
    const view = this.action(name);
    const affordance = this.td.actions?.[name];
    const form = pickForm(affordance?.forms, 'invokeaction')!;
    let payload: unknown;
    if (affordance?.input?.type === 'object') {
      const obj: Record<string, unknown> = {};
      for (const field of view.inputs) {
        const raw = inputs[field.name];
        if (raw === undefined || raw === '') continue;
        obj[field.name] = coerce(raw, field.schemaType);
      }
      payload = obj;
    } else if (affordance?.input?.type) {
      const raw = inputs[view.inputs[0]?.name ?? 'value'];
      payload = raw === undefined ? undefined : coerce(raw, affordance.input.type);
    }
    view.busy = true;
    try {
      const result = await invokeForm(
        resolveHref(form.href, this.td.base),
        formMethod(form, 'invokeaction'), payload, this.fetchImpl);
      view.lastResult = result === null ? '(no body)' : pretty(result);
      view.error = null;
    } catch (err) {
      view.error = String(err);
      view.busy = false;
      return view;
    }
    view.busy = false;
    // the thing's state likely changed: refresh what we display
    await Promise.all(this.properties.map((p) => this.readProperty(p.name)));
    return view;
  }
}

function coerce(raw: string, schemaType: string | null | undefined): unknown {
  if (schemaType === 'number' || schemaType === 'integer') return Number(raw);
  if (schemaType === 'boolean') return raw === 'true';
  if (schemaType === 'object' || schemaType === 'array') {
    try {
      return JSON.parse(raw);
    } catch {
      return raw;
    }
  }
  return raw;
}
