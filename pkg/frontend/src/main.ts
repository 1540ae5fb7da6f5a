// Browser entry: wire the session to the page.

import { StudioApi } from './api.js';
import { testImage } from './image.js';
import { StudioSession } from './studio.js';
import type { TaskDoc } from './types.js';

const ASPECTS = ['predictability', 'efficiency', 'explorability'];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function drawWorking(session: StudioSession, canvas: HTMLCanvasElement): void {
  const image = session.workingImage;
  canvas.width = image.width;
  canvas.height = image.height;
  const context = canvas.getContext('2d');
  if (context) {
    context.putImageData(
      new ImageData(new Uint8ClampedArray(image.data), image.width, image.height),
      0,
      0,
    );
  }
}

async function boot(): Promise<void> {
  const baseUrl = (window as { ALIGNUI_BASE_URL?: string }).ALIGNUI_BASE_URL ?? '';
  const api = new StudioApi(baseUrl || `${location.protocol}//${location.host}`);
  const participant = `studio-${Math.random().toString(36).slice(2, 10)}`;
  const session = new StudioSession(api, participant, testImage(320, 213));
  session.preferenceQueue.attachOnlineReplay(window);
  session.selectionQueue.attachOnlineReplay(window);

  const taskSelect = el<HTMLSelectElement>('task-select');
  const aspectSelect = el<HTMLSelectElement>('aspect-select');
  const controlsPane = el<HTMLDivElement>('controls');
  const preview = el<HTMLCanvasElement>('preview');
  const statusLine = el<HTMLParagraphElement>('status');
  const voteButtons = el<HTMLDivElement>('vote-buttons');

  for (const aspect of ASPECTS) {
    const option = document.createElement('option');
    option.value = aspect;
    option.textContent = aspect;
    aspectSelect.appendChild(option);
  }

  const tasks = await api.tasks();
  const allTasks: TaskDoc[] = [...tasks.dataset_tasks, ...tasks.evaluation_tasks];
  for (const task of allTasks) {
    const option = document.createElement('option');
    option.value = task.name;
    option.textContent = task.name;
    taskSelect.appendChild(option);
  }

  async function refresh(): Promise<void> {
    const task = allTasks.find((candidate) => candidate.name === taskSelect.value);
    if (!task) return;
    statusLine.textContent = 'Generating controls...';
    try {
      await session.loadControls(
        { name: task.name, description: task.description },
        [aspectSelect.value],
      );
    } catch (err) {
      statusLine.textContent = `Generation failed: ${err instanceof Error ? err.message : err}`;
      return;
    }
    controlsPane.innerHTML = '';
    voteButtons.innerHTML = '';
    const rendered = session.renderAll(controlsPane, { doc: document });
    for (const control of rendered) {
      if (control.error) continue;
      const vote = document.createElement('button');
      vote.type = 'button';
      vote.textContent = `Prefer ${control.kind}`;
      vote.addEventListener('click', async () => {
        const outcome = await session.submitControlPreference(aspectSelect.value, control.kind);
        statusLine.textContent =
          outcome === 'accepted'
            ? `Recorded your ${control.kind} preference. Thanks!`
            : outcome === 'queued'
              ? 'Offline: your vote is queued and will replay.'
              : `Vote not recorded (${outcome}).`;
      });
      voteButtons.appendChild(vote);
    }
    drawWorking(session, preview);
    const timer = window.setInterval(() => drawWorking(session, preview), 120);
    taskSelect.addEventListener('change', () => window.clearInterval(timer), { once: true });
    statusLine.textContent = `Showing ${session.specs.length} controls for ${task.name}.`;
  }

  taskSelect.addEventListener('change', refresh);
  aspectSelect.addEventListener('change', refresh);
  if (allTasks.length) {
    taskSelect.value = allTasks[0].name;
    await refresh();
  }
}

boot().catch((err) => {
  const statusLine = document.getElementById('status');
  if (statusLine) statusLine.textContent = `Startup failed: ${err}`;
});
