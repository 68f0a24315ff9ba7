/** Shared test plumbing: a routing fetch stub and the canonical ping canvas. */

import { RuntimeApi, type FetchLike } from '../src/api.js';
import { Catalog } from '../src/catalog.js';
import { EditorSession } from '../src/session.js';
import type { ThingDescriptionJson } from '../src/types.js';

export type Route = (init?: RequestInit) => { status: number; body?: unknown };

export function fakeFetch(routes: Record<string, Route>): FetchLike & { calls: string[] } {
  const calls: string[] = [];
  const impl = (async (url: string, init?: RequestInit) => {
    calls.push(`${init?.method ?? 'GET'} ${url}`);
    // most specific route wins, regardless of declaration order
    const key = Object.keys(routes)
      .filter((k) => url.includes(k))
      .sort((a, b) => b.length - a.length)[0];
    if (!key) return new Response(JSON.stringify({ error: `no route for ${url}` }), { status: 599 });
    const { status, body } = routes[key](init);
    return new Response(body === undefined ? null : JSON.stringify(body), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });
  }) as FetchLike & { calls: string[] };
  impl.calls = calls;
  return impl;
}

export function sessionWith(fetchImpl: FetchLike, catalog = new Catalog()): EditorSession {
  return new EditorSession(new RuntimeApi('http://runtime.test', fetchImpl), catalog);
}

/** Compose the ping agent exactly as a user would in the editor. */
export function buildPingCanvas(session: EditorSession): void {
  session.agentName = 'ping';

  const belief = session.create('init_belief');
  const note = session.create('literal', { FUNCTOR: 'note' });
  session.setVariadicCount(note, 1);
  session.attach(note, 'ARG0', session.create('value_number', { NUM: 50 }));
  session.attach(belief, 'BELIEF', note);
  session.addTop(belief, { x: 20, y: 20 });

  const goal = session.create('init_goal');
  session.attach(goal, 'GOAL', session.create('value_atom', { NAME: 'start' }));
  session.addTop(goal, { x: 20, y: 90 });

  for (const trigger of ['start', 'ping']) {
    const plan = session.create('plan', { TRIGGER_KIND: 'wants' });
    session.attach(plan, 'TRIGGER', session.create('value_atom', { NAME: trigger }));
    const context = session.create('literal', { FUNCTOR: 'note' });
    session.setVariadicCount(context, 1);
    session.attach(context, 'ARG0', session.create('value_variable', { NAME: 'W' }));
    session.attach(plan, 'CONTEXT', context);
    const wait = session.create('act_wait');
    session.attach(wait, 'TIME', session.create('value_variable', { NAME: 'W' }));
    const ask = session.create('comm_achieve');
    session.attach(ask, 'RECEIVER', session.create('value_atom', { NAME: 'pong' }));
    session.attach(ask, 'GOAL', session.create('value_atom', { NAME: 'pong' }));
    session.chain(wait, ask);
    session.attach(plan, 'BODY', wait);
    session.addTop(plan, { x: 20, y: trigger === 'start' ? 160 : 320 });
  }
}

export const LAMP_TD: ThingDescriptionJson = {
  id: 'urn:example:lamp-1',
  title: 'lamp',
  base: 'http://lamp.test',
  properties: {
    on: { type: 'boolean', forms: [{ href: '/properties/on' }] },
  },
  actions: {
    toggle: { forms: [{ href: '/actions/toggle' }] },
  },
};
