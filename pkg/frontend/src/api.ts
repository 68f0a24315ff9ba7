/**
 * Thin fetch clients for the runtime service and the TD repository, plus
 * direct affordance invocation for the thing explorer.
 *
 * All constructors take a fetch implementation so tests can inject one.
 */

import type {
  AgentTemplate,
  BlockDocument,
  CompileResponse,
  ConfigurationEntry,
  LogChunk,
  RunRecord,
  ThingDescriptionJson,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly body?: unknown) {
    super(message);
  }
}

async function asJson(response: Response): Promise<unknown> {
  const text = await response.text();
  return text ? JSON.parse(text) : null;
}

async function expect(response: Response, ...statuses: number[]): Promise<unknown> {
  const body = await asJson(response);
  if (!statuses.includes(response.status)) {
    const message = (body as { error?: string } | null)?.error ??
      `unexpected status ${response.status}`;
    throw new ApiError(message, response.status, body);
  }
  return body;
}

export class RuntimeApi {
  constructor(readonly baseUrl: string, private fetchImpl: FetchLike = fetch) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, '') + path;
  }

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const init: RequestInit = { method, headers: { Accept: 'application/json' } };
    if (body !== undefined) {
      init.headers = { ...init.headers, 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    return this.fetchImpl(this.url(path), init);
  }

  /** POST /compile. 200 and 400 are both meaningful (diagnostics). */
  async compile(doc: BlockDocument): Promise<CompileResponse> {
    const response = await this.request('POST', '/compile', doc);
    const body = (await asJson(response)) as CompileResponse | null;
    if (response.status !== 200 && response.status !== 400) {
      throw new ApiError(`compile failed (${response.status})`, response.status, body);
    }
    return body ?? { source: null, diagnostics: [] };
  }

  async saveAgent(name: string, template: Omit<AgentTemplate, 'name'>): Promise<AgentTemplate> {
    const response = await this.request('PUT', `/agents/${name}`, template);
    return (await expect(response, 200, 201)) as AgentTemplate;
  }

  async listAgents(): Promise<AgentTemplate[]> {
    return (await expect(await this.request('GET', '/agents'), 200)) as AgentTemplate[];
  }

  async saveConfiguration(name: string, entries: ConfigurationEntry[],
                          workspace?: string): Promise<void> {
    await expect(await this.request('PUT', `/configurations/${name}`,
                                    { entries, workspace }), 200, 201);
  }

  async startRun(configuration: string): Promise<RunRecord> {
    const response = await this.request('POST', '/runs', { configuration });
    return (await expect(response, 201)) as RunRecord;
  }

  async runStatus(runId: string): Promise<RunRecord> {
    return (await expect(await this.request('GET', `/runs/${runId}`), 200)) as RunRecord;
  }

  async stopRun(runId: string): Promise<void> {
    await expect(await this.request('DELETE', `/runs/${runId}`), 200, 410);
  }

  async beliefs(runId: string, agent: string): Promise<string[]> {
    const response = await this.request(
      'GET', `/runs/${runId}/agents/${agent}/beliefs`);
    return (await expect(response, 200)) as string[];
  }

  async log(runId: string, since: number): Promise<LogChunk> {
    const response = await this.request('GET', `/runs/${runId}/log?since=${since}`);
    return (await expect(response, 200)) as LogChunk;
  }
}

export class TdRepoApi {
  constructor(readonly baseUrl: string, private fetchImpl: FetchLike = fetch) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, '') + path;
  }

  async listWorkspaces(): Promise<string[]> {
    const response = await this.fetchImpl(this.url('/workspaces'));
    return (await expect(response, 200)) as string[];
  }

  async listThings(workspace: string): Promise<ThingDescriptionJson[]> {
    const response = await this.fetchImpl(this.url(`/workspaces/${workspace}/things`));
    return (await expect(response, 200)) as ThingDescriptionJson[];
  }
}

/** One affordance request, straight at the thing's form target. */
export async function invokeForm(
  href: string, method: string, payload?: unknown,
  fetchImpl: FetchLike = fetch,
): Promise<unknown> {
  const init: RequestInit = { method, headers: { Accept: 'application/json' } };
  if (payload !== undefined) {
    init.headers = { ...init.headers, 'Content-Type': 'application/json' };
    init.body = JSON.stringify(payload);
  }
  const response = await fetchImpl(href, init);
  const body = await asJson(response);
  if (response.status < 200 || response.status >= 300) {
    throw new ApiError(`${method} ${href} returned ${response.status}`,
                       response.status, body);
  }
  return body;
}
