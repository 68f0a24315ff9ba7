/**
 * Deploy flow: save the canvas as a template, pick/build a run-time
 * configuration, start the run and watch beliefs/log live until stopped.
 *
 * Deploying is blocked client-side while the session has error diagnostics;
 * the texts shown are exactly the server's.
 */

import type { RuntimeApi } from './api.js';
import type { EditorSession } from './session.js';
import type { ConfigurationEntry, Diagnostic, RunRecord } from './types.js';

export type DeployPhase =
  | 'idle' | 'saving' | 'starting' | 'watching' | 'stopped' | 'failed';

export interface AgentWatch {
  name: string;
  beliefs: string[];
}

export class DeployFlow {
  phase: DeployPhase = 'idle';
  error: string | null = null;
  diagnostics: Diagnostic[] = [];
  run: RunRecord | null = null;
  agents: AgentWatch[] = [];
  logLines: string[] = [];
  private logCursor = 0;

  constructor(private api: RuntimeApi, private session: EditorSession) {}

  /** PUT the template, PUT the configuration, POST the run. */
  async deploy(configName: string, entries: ConfigurationEntry[],
               workspace?: string): Promise<void> {
    if (this.session.hasErrors) {
      this.phase = 'failed';
      this.diagnostics = this.session.diagnostics;
      this.error = 'fix the problems in the program before deploying';
      return;
    }
    this.phase = 'saving';
    this.error = null;
    this.diagnostics = [];
    try {
      await this.api.saveAgent(this.session.agentName, {
        sourceKind: 'blocks',
        body: this.session.serialize(),
      });
      await this.api.saveConfiguration(configName, entries, workspace);
      this.phase = 'starting';
      this.run = await this.api.startRun(configName);
      this.agents = expandEntries(entries).map((name) => ({ name, beliefs: [] }));
      this.logCursor = 0;
      this.logLines = [];
      this.phase = 'watching';
    } catch (err: unknown) {
      this.phase = 'failed';
      const body = (err as { body?: { diagnostics?: Diagnostic[] } }).body;
      this.diagnostics = body?.diagnostics ?? [];
      this.error = String(err);
    }
  }

  /** One poll tick (the UI calls this once a second while watching). */
  async poll(): Promise<void> {
    if (this.phase !== 'watching' || !this.run) return;
    try {
      const status = await this.api.runStatus(this.run.runId);
      this.run = status;
      if (status.status !== 'running') {
        this.phase = 'stopped';
        return;
      }
      for (const agent of this.agents) {
        agent.beliefs = await this.api.beliefs(this.run.runId, agent.name);
      }
      const chunk = await this.api.log(this.run.runId, this.logCursor);
      this.logLines.push(...chunk.lines);
      this.logCursor = chunk.next;
    } catch (err) {
      this.error = String(err);
    }
  }

  async stop(): Promise<void> {
    if (!this.run) return;
    await this.api.stopRun(this.run.runId);
    this.run = await this.api.runStatus(this.run.runId);
    this.phase = 'stopped';
  }
}

/** Instance names a configuration expands to: `base` or `base_1..base_n`. */
export function expandEntries(entries: ConfigurationEntry[]): string[] {
  const names: string[] = [];
  for (const entry of entries) {
    const base = entry.baseName ?? entry.template;
    const count = entry.count ?? 1;
    if (count === 1) names.push(base);
    else for (let i = 1; i <= count; i++) names.push(`${base}_${i}`);
  }
  return names;
}
