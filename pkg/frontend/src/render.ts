/**
 * DOM rendering: the palette (drag sources), the canvas (drop targets for
 * typed slots and statement chains), the live code preview, the thing
 * explorer forms and the deploy console.
 *
 * Drag payloads carry a palette type id or a canvas block id; drops are
 * refused unless the session's connection rules allow the snap, so the
 * canvas can never hold a program the server would reject structurally.
 */

import type { PaletteCategory } from './catalog.js';
import { EditorBlock } from './document.js';
import type { ThingExplorer } from './explorer.js';
import type { DeployFlow } from './deploy.js';
import { ConnectionError, EditorSession } from './session.js';

const MIME_TYPE = 'application/x-block-type';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// --- palette -------------------------------------------------------------

export function renderPalette(
  container: HTMLElement, categories: PaletteCategory[],
): void {
  container.replaceChildren();
  for (const category of categories) {
    const section = el('div', 'palette-category');
    const header = el('div', 'palette-header', category.name);
    header.style.background = category.color;
    section.appendChild(header);
    for (const def of category.blocks) {
      const item = el('div', 'palette-block', def.label);
      item.style.borderLeft = `6px solid ${category.color}`;
      item.draggable = true;
      item.title = def.id;
      item.addEventListener('dragstart', (ev) => {
        ev.dataTransfer?.setData(MIME_TYPE, def.id);
      });
      section.appendChild(item);
    }
    container.appendChild(section);
  }
}

// --- canvas ---------------------------------------------------------------------

export function renderCanvas(container: HTMLElement, session: EditorSession,
                             onEdit: () => void): void {
  container.replaceChildren();
  container.addEventListener('dragover', (ev) => ev.preventDefault());
  container.ondrop = (ev) => {
    ev.preventDefault();
    const typeId = ev.dataTransfer?.getData(MIME_TYPE);
    if (!typeId) return;
    try {
      session.addTop(session.create(typeId),
                     { x: ev.offsetX, y: ev.offsetY });
      onEdit();
    } catch (err) {
      if (!(err instanceof ConnectionError)) throw err;
      flashMessage(container, String(err.message));
    }
  };
  for (const top of session.tops) {
    const wrapper = el('div', 'canvas-top');
    wrapper.appendChild(renderBlock(top, session, onEdit));
    const remove = el('button', 'remove-block', '✕');
    remove.addEventListener('click', () => {
      session.removeTop(top);
      onEdit();
    });
    wrapper.appendChild(remove);
    container.appendChild(wrapper);
  }
}

function renderBlock(block: EditorBlock, session: EditorSession,
                     onEdit: () => void): HTMLElement {
  const def = session.defOf(block);
  const node = el('div', 'block');
  node.dataset.blockId = block.id;
  const head = el('div', 'block-head', def.label);
  node.appendChild(head);

  for (const field of def.fields ?? []) {
    head.appendChild(renderField(block, field.name, field.kind,
                                 field.choices, session, onEdit));
  }
  if (def.variadic) {
    head.appendChild(renderArityControl(block, session, onEdit));
  }
  const slots = session.catalog.slotsFor(def, block.mutation);
  for (const slot of slots) {
    const row = el('div', 'slot-row');
    row.appendChild(el('span', 'slot-name', slot.name.toLowerCase()));
    const zone = el('div', 'slot-zone');
    const child = block.inputs.get(slot.name);
    if (child) {
      zone.appendChild(renderBlock(child, session, onEdit));
      const eject = el('button', 'remove-block', '✕');
      eject.addEventListener('click', () => {
        session.detach(block, slot.name);
        onEdit();
      });
      zone.appendChild(eject);
    } else {
      zone.classList.add('empty');
      zone.textContent = slot.required === false ? '(optional)' : '(drop here)';
      zone.addEventListener('dragover', (ev) => ev.preventDefault());
      zone.addEventListener('drop', (ev) => {
        ev.preventDefault();
        ev.stopPropagation();
        const typeId = ev.dataTransfer?.getData(MIME_TYPE);
        if (!typeId) return;
        try {
          session.attach(block, slot.name, session.create(typeId));
          onEdit();
        } catch (err) {
          if (!(err instanceof ConnectionError)) throw err;
          flashMessage(zone, String(err.message));
        }
      });
    }
    node.appendChild(row);
    row.appendChild(zone);
  }
  if (def.hasNext) {
    const tail = el('div', 'next-zone');
    if (block.next) {
      tail.appendChild(renderBlock(block.next, session, onEdit));
    } else {
      tail.classList.add('empty');
      tail.textContent = '(next instruction)';
      tail.addEventListener('dragover', (ev) => ev.preventDefault());
      tail.addEventListener('drop', (ev) => {
        ev.preventDefault();
        ev.stopPropagation();
        const typeId = ev.dataTransfer?.getData(MIME_TYPE);
        if (!typeId) return;
        try {
          session.chain(block, session.create(typeId));
          onEdit();
        } catch (err) {
          if (!(err instanceof ConnectionError)) throw err;
          flashMessage(tail, String(err.message));
        }
      });
    }
    node.appendChild(tail);
  }
  return node;
}

function renderField(block: EditorBlock, name: string, kind: string,
                     choices: string[] | undefined, session: EditorSession,
                     onEdit: () => void): HTMLElement {
  if (kind === 'choice') {
    const select = el('select', 'field');
    for (const choice of choices ?? []) {
      const option = el('option', undefined, choice);
      option.value = choice;
      select.appendChild(option);
    }
    select.value = String(block.fields[name] ?? choices?.[0] ?? '');
    if (!(name in block.fields)) session.setField(block, name, select.value);
    select.addEventListener('change', () => {
      session.setField(block, name, select.value);
      onEdit();
    });
    return select;
  }
  const input = el('input', 'field');
  input.type = kind === 'number' ? 'number' : 'text';
  input.placeholder = name.toLowerCase();
  input.value = String(block.fields[name] ?? '');
  input.addEventListener('change', () => {
    session.setField(block, name,
                     kind === 'number' ? Number(input.value) : input.value);
    onEdit();
  });
  return input;
}

function renderArityControl(block: EditorBlock, session: EditorSession,
                            onEdit: () => void): HTMLElement {
  const def = session.defOf(block);
  const wrap = el('span', 'arity');
  const minus = el('button', undefined, '−');
  const plus = el('button', undefined, '+');
  const count = () => parseInt(block.mutation[def.variadic!.countKey] ?? '0', 10) || 0;
  minus.addEventListener('click', () => {
    session.setVariadicCount(block, Math.max(0, count() - 1));
    onEdit();
  });
  plus.addEventListener('click', () => {
    session.setVariadicCount(block, count() + 1);
    onEdit();
  });
  wrap.append(minus, el('span', 'arity-count', String(count())), plus);
  return wrap;
}

function flashMessage(target: HTMLElement, message: string): void {
  const note = el('div', 'snap-refused', message);
  target.appendChild(note);
  setTimeout(() => note.remove(), 1500);
}

// --- preview ---------------------------------------------------------------------

export function renderPreview(container: HTMLElement, session: EditorSession): void {
  container.replaceChildren();
  const banner = el('div', 'preview-banner');
  if (session.preview.status === 'error') {
    banner.textContent = session.preview.banner ?? 'compile failed';
    banner.classList.add('error');
  } else if (session.preview.status === 'pending') {
    banner.textContent = 'compiling...';
  }
  if (banner.textContent) container.appendChild(banner);
  container.appendChild(el('pre', 'preview-code', session.preview.text));
  if (session.preview.diagnostics.length) {
    const list = el('ul', 'diagnostics');
    for (const d of session.preview.diagnostics) {
      list.appendChild(el('li', `diag-${d.severity}`,
                          `${d.severity}: ${d.message}`));
    }
    container.appendChild(list);
  }
}

// --- explorer -------------------------------------------------------------------

export function renderExplorer(container: HTMLElement, explorer: ThingExplorer,
                               onUpdate: () => void): void {
  container.replaceChildren();
  container.appendChild(el('h3', undefined, explorer.title));
  for (const prop of explorer.properties) {
    const card = el('div', 'affordance');
    card.appendChild(el('div', 'affordance-name',
                        `property ${prop.name}${prop.writable ? '' : ' (read-only)'}`));
    card.appendChild(el('pre', 'affordance-value', prop.value ?? '(not read yet)'));
    if (prop.error) card.appendChild(el('div', 'affordance-error', prop.error));
    const read = el('button', undefined, 'read');
    read.addEventListener('click', () => {
      void explorer.readProperty(prop.name).then(onUpdate);
    });
    card.appendChild(read);
    if (prop.writable) {
      const input = el('input');
      input.placeholder = prop.schemaType ?? 'value';
      const write = el('button', undefined, 'write');
      write.addEventListener('click', () => {
        void explorer.writeProperty(prop.name, input.value).then(onUpdate);
      });
      card.append(input, write);
    }
    container.appendChild(card);
  }
  for (const action of explorer.actions) {
    const card = el('div', 'affordance');
    card.appendChild(el('div', 'affordance-name', `action ${action.name}`));
    const fields = new Map<string, HTMLInputElement>();
    for (const field of action.inputs) {
      const input = el('input');
      input.placeholder = `${field.name} (${field.schemaType ?? 'any'})`;
      fields.set(field.name, input);
      card.appendChild(input);
    }
    const invoke = el('button', undefined, 'invoke');
    invoke.addEventListener('click', () => {
      const values: Record<string, string> = {};
      for (const [name, input] of fields) values[name] = input.value;
      void explorer.invokeAction(action.name, values).then(onUpdate);
    });
    card.appendChild(invoke);
    if (action.lastResult) card.appendChild(el('pre', 'affordance-value', action.lastResult));
    if (action.error) card.appendChild(el('div', 'affordance-error', action.error));
    container.appendChild(card);
  }
  for (const event of explorer.events) {
    const card = el('div', 'affordance');
    card.appendChild(el('div', 'affordance-name',
                        `event ${event.name} (display only)`));
    container.appendChild(card);
  }
}

// --- deploy console --------------------------------------------------------------

export function renderDeploy(container: HTMLElement, flow: DeployFlow): void {
  container.replaceChildren();
  container.appendChild(el('div', 'deploy-phase', `state: ${flow.phase}`));
  if (flow.error) container.appendChild(el('div', 'affordance-error', flow.error));
  for (const d of flow.diagnostics) {
    container.appendChild(el('div', `diag-${d.severity}`, `${d.severity}: ${d.message}`));
  }
  if (flow.run) {
    container.appendChild(el('div', undefined,
                             `run ${flow.run.runId}: ${flow.run.status}`));
  }
  for (const agent of flow.agents) {
    const card = el('div', 'agent-watch');
    card.appendChild(el('div', 'affordance-name', agent.name));
    card.appendChild(el('pre', undefined, agent.beliefs.join('\n') || '(no beliefs)'));
    container.appendChild(card);
  }
  if (flow.logLines.length) {
    container.appendChild(el('pre', 'run-log', flow.logLines.slice(-200).join('\n')));
  }
}
