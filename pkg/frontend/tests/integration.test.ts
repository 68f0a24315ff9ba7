/**
 * End-to-end gate against the real backend: spawns the Python runtime
 * service and the bundled mock lamp, then checks the two release criteria
 * that involve this frontend:
 *   - composing the ping agent in the editor yields a code preview
 *     byte-identical to the CLI compile golden file;
 *   - toggling the mock lamp through the Thing Explorer flips the displayed
 *     value within one poll interval.
 */

import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { RuntimeApi } from '../src/api.js';
import { ThingExplorer } from '../src/explorer.js';
import { EditorSession } from '../src/session.js';
import { buildPingCanvas } from './helpers.js';
import type { ThingDescriptionJson } from '../src/types.js';

const GOLDEN = new URL('../../tests/fixtures/ping.golden.asl', import.meta.url);
const RUNTIME_PORT = 18095;
const RUNTIME_URL = `http://127.0.0.1:${RUNTIME_PORT}`;

const havePython = spawnSync('python3', ['-c', 'import blockspeak']).status === 0;

const LAMP_HELPER = `
import sys, time
from blockspeak.wot import MockLamp
lamp = MockLamp()
print(lamp.start(), flush=True)
time.sleep(600)
`;

async function waitFor(url: string, timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      await fetch(url);
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error(`service at ${url} never came up`);
}

function readLine(proc: ChildProcess): Promise<string> {
  return new Promise((resolve, reject) => {
    proc.stdout!.once('data', (chunk: Buffer) => resolve(chunk.toString().trim()));
    proc.once('error', reject);
    setTimeout(() => reject(new Error('no output from helper')), 15000);
  });
}

describe.skipIf(!havePython)('against the real backend', () => {
  let runtime: ChildProcess;
  let lamp: ChildProcess;
  let lampUrl: string;

  beforeAll(async () => {
    const data = mkdtempSync(join(tmpdir(), 'ide-it-'));
    runtime = spawn('python3', ['-m', 'blockspeak.cli', 'serve', 'runtime',
                                '--addr', `127.0.0.1:${RUNTIME_PORT}`,
                                '--data', data]);
    lamp = spawn('python3', ['-c', LAMP_HELPER]);
    lampUrl = await readLine(lamp);
    await waitFor(`${RUNTIME_URL}/agents`);
  }, 30000);

  afterAll(() => {
    runtime?.kill('SIGINT');
    lamp?.kill('SIGINT');
  });

  it('editor-composed ping previews byte-identical to the compile golden file',
     async () => {
    const session = new EditorSession(new RuntimeApi(RUNTIME_URL));
    buildPingCanvas(session);
    const preview = await session.refreshPreview();
    expect(preview.status).toBe('current');
    expect(preview.text).toBe(readFileSync(GOLDEN, 'utf-8'));
  });

  it('anything the editor lets you build passes server validation', async () => {
    const api = new RuntimeApi(RUNTIME_URL);

    // a corpus of editor-constructible canvases beyond the ping agent
    const rule = new EditorSession(api);
    const init = rule.create('init_rule');
    const head = rule.create('literal', { FUNCTOR: 'big' });
    rule.setVariadicCount(head, 1);
    rule.attach(head, 'ARG0', rule.create('value_variable', { NAME: 'X' }));
    rule.attach(init, 'HEAD', head);
    const cmp = rule.create('op_compare', { OP: '>' });
    rule.attach(cmp, 'LEFT', rule.create('value_variable', { NAME: 'X' }));
    rule.attach(cmp, 'RIGHT', rule.create('value_number', { NUM: 10 }));
    const body = rule.create('op_and');
    const size = rule.create('literal', { FUNCTOR: 'size' });
    rule.setVariadicCount(size, 1);
    rule.attach(size, 'ARG0', rule.create('value_variable', { NAME: 'X' }));
    rule.attach(body, 'LEFT', size);
    rule.attach(body, 'RIGHT', cmp);
    rule.attach(init, 'BODY', body);
    rule.addTop(init);

    const lists = new EditorSession(api);
    const belief = lists.create('init_belief');
    const fact = lists.create('literal', { FUNCTOR: 'flags' });
    lists.setVariadicCount(fact, 1);
    const cons = lists.create('value_list_cons');
    lists.attach(cons, 'HEAD', lists.create('value_boolean', { BOOL: 'true' }));
    lists.attach(cons, 'TAIL', lists.create('value_empty_list'));
    lists.attach(fact, 'ARG0', cons);
    lists.attach(belief, 'BELIEF', fact);
    lists.addTop(belief);

    for (const session of [rule, lists]) {
      const result = await api.compile(session.serialize());
      expect(result.diagnostics.filter((d) => d.severity === 'error')).toEqual([]);
      expect(result.source).not.toBeNull();
    }

    // what the editor refuses, the server refuses too: force the document
    // the snap rules would never allow (a number block in a statement slot)
    const refused = await api.compile({
      formatVersion: 1,
      agentName: 'bad',
      topBlocks: [{
        id: 'p1', type: 'plan', fields: { TRIGGER_KIND: 'wants' },
        inputs: {
          TRIGGER: { id: 't', type: 'value_atom', fields: { NAME: 'go' } },
          BODY: { id: 'n', type: 'value_number', fields: { NUM: 5 } },
        },
      }],
    });
    expect(refused.source).toBeNull();
    expect(refused.diagnostics.some((d) => d.code === 'TypeMismatch')).toBe(true);
  });

  it('toggling the lamp in the explorer flips the displayed value', async () => {
    const td = (await (await fetch(`${lampUrl}/td`)).json()) as ThingDescriptionJson;
    const explorer = new ThingExplorer(td);
    await explorer.readProperty('on');
    const before = explorer.property('on').value;
    expect(before).toContain('false');

    await explorer.invokeAction('toggle');

    const after = explorer.property('on').value;
    expect(after).toContain('true');
    expect(after).not.toBe(before);
  }, 15000);
});
