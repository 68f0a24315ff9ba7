/** Wire formats shared with the runtime service and the TD repository. */

export const FORMAT_VERSION = 1;

export type FieldValue = string | number | boolean;

/** One serialized block inside a `.blocks.json` document. */
export interface BlockJson {
  id: string;
  type: string;
  fields?: Record<string, FieldValue>;
  inputs?: Record<string, BlockJson>;
  mutation?: Record<string, string>;
  next?: BlockJson;
  meta?: Record<string, unknown>;
}

export interface BlockDocument {
  formatVersion: number;
  agentName: string;
  topBlocks: BlockJson[];
}

export interface Diagnostic {
  severity: 'error' | 'warning';
  code: string;
  message: string;
  blockId?: string;
  line?: number;
  col?: number;
}

export interface CompileResponse {
  source: string | null;
  diagnostics: Diagnostic[];
}

export interface AgentTemplate {
  name: string;
  sourceKind: 'blocks' | 'text';
  body: BlockDocument | string;
  updatedAt?: string;
}

export interface ConfigurationEntry {
  template: string;
  baseName?: string;
  count?: number;
}

export interface RunRecord {
  runId: string;
  configuration: string;
  status: 'running' | 'stopped' | 'failed';
  startedAt?: string;
  stoppedAt?: string;
}

export interface LogChunk {
  lines: string[];
  next: number;
}

/** The slice of a Thing Description the IDE consumes. */
export interface TdForm {
  href: string;
  'htv:methodName'?: string;
  contentType?: string;
  op?: string | string[];
}

export interface TdAffordance {
  forms?: TdForm[];
  type?: string;
  readOnly?: boolean;
  input?: { type?: string; properties?: Record<string, { type?: string }> };
}

export interface ThingDescriptionJson {
  id: string;
  title: string;
  base?: string;
  properties?: Record<string, TdAffordance>;
  actions?: Record<string, TdAffordance>;
  events?: Record<string, TdAffordance>;
  [extra: string]: unknown;
}
