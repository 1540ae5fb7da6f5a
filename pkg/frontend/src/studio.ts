// Studio session: one participant working one task against the service.
//
// Holds the fetched specs/recommendation, the source image (never mutated,
// every edit derives a fresh working buffer), and the pending submissions.
// Votes may only reference options that are actually on screen.

import { StudioApi } from './api.js';
import { applyAdjustment, cloneImage, hexToHue, type ImageBuffer } from './image.js';
import { SubmissionQueue } from './queue.js';
import { renderControl, type RenderedControl, type RenderOptions } from './widgets.js';
import type {
  AssignmentItemDoc,
  ControlSpecDoc,
  ControlValue,
  RecommendationDoc,
  WeightedControlDoc,
} from './types.js';

export interface TaskView {
  name: string;
  description: string;
}

export interface ComparisonOption {
  label: string;
  controls: WeightedControlDoc[];
  condition: string; // kept internally, never rendered
}

export class StudioSession {
  task: TaskView | null = null;
  specs: ControlSpecDoc[] = [];
  recommendation: RecommendationDoc | null = null;
  readonly sourceImage: ImageBuffer;
  workingImage: ImageBuffer;
  position: { x: number; y: number } | null = null;
  completedItems = new Set<string>();
  readonly preferenceQueue: SubmissionQueue<Parameters<StudioApi['submitPreference']>[0]>;
  readonly selectionQueue: SubmissionQueue<Parameters<StudioApi['submitSelection']>[0]>;

  constructor(
    public readonly api: StudioApi,
    public readonly participant: string,
    sourceImage: ImageBuffer,
  ) {
    this.sourceImage = sourceImage;
    this.workingImage = cloneImage(sourceImage);
    this.preferenceQueue = new SubmissionQueue((vote) => api.submitPreference(vote));
    this.selectionQueue = new SubmissionQueue((vote) => api.submitSelection(vote));
  }

  async loadControls(
    task: TaskView,
    aspects: string[],
    condition?: string,
    runs?: number,
  ): Promise<void> {
    const reply = await this.api.generate({
      task: task.description,
      aspects,
      condition,
      runs,
    });
    this.task = task;
    this.specs = reply.specs;
    this.recommendation = reply.recommendation;
    this.workingImage = cloneImage(this.sourceImage);
    this.position = null;
  }

  displayedKinds(): Set<string> {
    return new Set(this.specs.map((spec) => spec.kind));
  }

  /** Derive a fresh working buffer from the untouched source. */
  applyValue(spec: ControlSpecDoc, value: ControlValue): ImageBuffer {
    if (typeof value === 'object') {
      this.position = value;
      this.workingImage = cloneImage(this.sourceImage);
      return this.workingImage;
    }
    let parameter = spec.parameter;
    let amount: number;
    if (typeof value === 'string') {
      parameter = 'hue';
      amount = hexToHue(value);
    } else if (spec.kind === 'color_wheel') {
      parameter = 'hue';
      amount = value;
    } else if (parameter === 'lightness' || parameter === 'saturation') {
      // continuous [min,max] maps onto a x0..x2 factor; midpoint is neutral
      const domain = spec.value_domain;
      if (domain.class === 'continuous') {
        amount = ((value - domain.min) / (domain.max - domain.min)) * 2;
      } else {
        amount = value * 2;
      }
    } else {
      amount = value;
    }
    this.workingImage = applyAdjustment(this.sourceImage, parameter, amount);
    return this.workingImage;
  }

  renderAll(container: HTMLElement, opts: Omit<RenderOptions, 'onValue' | 'image'>): RenderedControl[] {
    const rendered: RenderedControl[] = [];
    for (const spec of this.specs) {
      const control = renderControl(spec, {
        ...opts,
        image: this.sourceImage,
        onValue: (value) => {
          this.applyValue(spec, value);
        },
      });
      container.appendChild(control.root);
      rendered.push(control);
    }
    return rendered;
  }

  /** Vote for one displayed control kind under one aspect. */
  async submitControlPreference(
    aspect: string,
    kind: string,
    reason = '',
    condition?: string,
  ): Promise<'accepted' | 'rejected' | 'queued' | 'blocked'> {
    if (!this.task) return 'blocked';
    if (!this.displayedKinds().has(kind)) {
      return 'blocked'; // selections reference only displayed options
    }
    return this.preferenceQueue.submit({
      participant: this.participant,
      task: this.task.name,
      aspect,
      kind,
      reason,
      condition,
    });
  }

  /**
   * Side-by-side comparison of two generated options: kinds, 10-point
   * scores, and rationales. The generating condition stays hidden.
   */
  renderComparison(
    doc: Document,
    aspect: string,
    left: ComparisonOption,
    right: ComparisonOption,
    onChoose: (side: 'left' | 'right') => void,
  ): HTMLElement {
    const root = doc.createElement('div');
    root.className = 'comparison';
    for (const [side, option] of [
      ['left', left],
      ['right', right],
    ] as const) {
      const card = doc.createElement('div');
      card.className = `comparison-card comparison-${side}`;
      const heading = doc.createElement('h3');
      heading.textContent = option.label; // e.g. "Option A" -- never the condition
      card.appendChild(heading);
      const list = doc.createElement('ul');
      for (const control of option.controls) {
        const item = doc.createElement('li');
        item.textContent = `${control.kind} (score ${control.score}/10): ${control.rationale}`;
        list.appendChild(item);
      }
      card.appendChild(list);
      const pick = doc.createElement('button');
      pick.type = 'button';
      pick.textContent = `Prefer ${option.label} for ${aspect}`;
      pick.addEventListener('click', () => onChoose(side));
      card.appendChild(pick);
      root.appendChild(card);
    }
    return root;
  }

  itemKey(item: AssignmentItemDoc): string {
    return `${item.task}|${item.aspect}|${item.pair[0]}|${item.pair[1]}`;
  }

  async submitComparison(
    item: AssignmentItemDoc,
    chosen: string,
  ): Promise<'accepted' | 'rejected' | 'queued' | 'blocked'> {
    if (!(item.pair as readonly string[]).includes(chosen)) {
      return 'blocked'; // only displayed options are votable
    }
    const key = this.itemKey(item);
    if (this.completedItems.has(key)) {
      return 'blocked';
    }
    const outcome = await this.selectionQueue.submit({
      participant: this.participant,
      task: item.task,
      aspect: item.aspect,
      left: item.pair[0],
      right: item.pair[1],
      chosen,
    });
    if (outcome === 'accepted') {
      this.completedItems.add(key);
    }
    return outcome;
  }
}
