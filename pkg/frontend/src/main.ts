/** Application wiring: workspace selection, palette, canvas, live preview,
 * thing explorer and deploy console. */

import { RuntimeApi, TdRepoApi } from './api.js';
import { Catalog } from './catalog.js';
import { DeployFlow, expandEntries } from './deploy.js';
import { ThingExplorer } from './explorer.js';
import {
  renderCanvas,
  renderDeploy,
  renderExplorer,
  renderPalette,
  renderPreview,
} from './render.js';
import { EditorSession } from './session.js';
import type { ThingDescriptionJson } from './types.js';

const params = new URLSearchParams(location.search);
const runtimeUrl = params.get('runtime') ?? 'http://127.0.0.1:8080';
const repoUrl = params.get('tdrepo') ?? 'http://127.0.0.1:8081';

const api = new RuntimeApi(runtimeUrl);
const repo = new TdRepoApi(repoUrl);

const paletteEl = document.getElementById('palette')!;
const canvasEl = document.getElementById('canvas')!;
const previewEl = document.getElementById('preview')!;
const explorerEl = document.getElementById('explorer')!;
const deployEl = document.getElementById('deploy-status')!;
const workspaceSelect = document.getElementById('workspace') as HTMLSelectElement;
const agentNameInput = document.getElementById('agent-name') as HTMLInputElement;
const statusBar = document.getElementById('status')!;

let session = new EditorSession(api);
let flow = new DeployFlow(api, session);
let explorers: ThingExplorer[] = [];
let pollTimer: ReturnType<typeof setInterval> | null = null;

function refreshUi(): void {
  renderCanvas(canvasEl, session, onCanvasEdit);
  renderPreview(previewEl, session);
  explorerEl.replaceChildren();
  for (const explorer of explorers) {
    const panel = document.createElement('div');
    explorerEl.appendChild(panel);
    renderExplorer(panel, explorer, refreshUi);
  }
  renderDeploy(deployEl, flow);
}

let previewTimer: ReturnType<typeof setTimeout> | null = null;

function onCanvasEdit(): void {
  // debounce: the preview reflects the canvas within half a second
  if (previewTimer) clearTimeout(previewTimer);
  previewTimer = setTimeout(() => {
    void session.refreshPreview().then(refreshUi);
  }, 400);
  refreshUi();
}

async function selectWorkspace(name: string | null): Promise<void> {
  let tds: ThingDescriptionJson[] = [];
  if (name) {
    try {
      tds = await repo.listThings(name);
      statusBar.textContent = `workspace '${name}': ${tds.length} thing(s)`;
    } catch (err) {
      // static categories stay usable without the repository
      statusBar.textContent = `TD repository unreachable (${String(err)}); ` +
        'showing the static palette only';
    }
  }
  const catalog = new Catalog(tds);
  const previous = session;
  session = new EditorSession(api, catalog);
  session.agentName = previous.agentName;
  session.workspace = name;
  flow = new DeployFlow(api, session);
  explorers = tds.map((td) => new ThingExplorer(td));
  renderPalette(paletteEl, catalog.categories);
  refreshUi();
}

async function loadWorkspaces(): Promise<void> {
  try {
    const names = await repo.listWorkspaces();
    workspaceSelect.replaceChildren();
    const none = document.createElement('option');
    none.value = '';
    none.textContent = '(no workspace)';
    workspaceSelect.appendChild(none);
    for (const name of names) {
      const option = document.createElement('option');
      option.value = name;
      option.textContent = name;
      workspaceSelect.appendChild(option);
    }
  } catch (err) {
    statusBar.textContent =
      `TD repository unreachable (${String(err)}); showing the static palette only`;
  }
}

workspaceSelect.addEventListener('change', () => {
  void selectWorkspace(workspaceSelect.value || null);
});

agentNameInput.addEventListener('change', () => {
  session.agentName = agentNameInput.value || 'agent';
  onCanvasEdit();
});

document.getElementById('deploy')!.addEventListener('click', () => {
  const name = session.agentName;
  void flow
    .deploy(`${name}_solo`, [{ template: name, count: 1 }],
            session.workspace ?? undefined)
    .then(() => {
      refreshUi();
      if (pollTimer) clearInterval(pollTimer);
      pollTimer = setInterval(() => {
        void flow.poll().then(() => {
          refreshUi();
          if (flow.phase !== 'watching' && pollTimer) {
            clearInterval(pollTimer);
            pollTimer = null;
          }
        });
      }, 1000);
      console.log('instances:', expandEntries([{ template: name, count: 1 }]));
    });
});

document.getElementById('stop')!.addEventListener('click', () => {
  void flow.stop().then(refreshUi);
});

document.getElementById('clear')!.addEventListener('click', () => {
  session.clear();
  onCanvasEdit();
});

void loadWorkspaces().then(() => selectWorkspace(null));
