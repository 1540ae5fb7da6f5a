// DOM widgets for the eight control kinds.
//
// Each widget binds one image parameter and reports values through onValue:
// numbers for continuous/discrete kinds, hex strings for color pickers, hue
// fractions for the wheel, and normalized {x, y} for direct clicks. Pixel
// previews draw through a PixelSurface so rendering also works where no real
// canvas 2D context exists (tests, server-side snapshots).

import {
  applyAdjustment,
  downscale,
  hsvToRgb,
  type ImageBuffer,
} from './image.js';
import type {
  ContinuousDomain,
  ControlSpecDoc,
  ControlValue,
  DiscreteDomain,
  PositionDomain,
} from './types.js';

export interface PixelSurface {
  element: HTMLElement;
  width: number;
  height: number;
  drawn: ImageBuffer | null;
  draw(image: ImageBuffer): void;
}

export type SurfaceFactory = (doc: Document, width: number, height: number) => PixelSurface;

/** Canvas-backed surface when a 2D context exists; headless holder otherwise. */
export function defaultSurfaceFactory(doc: Document, width: number, height: number): PixelSurface {
  const canvas = doc.createElement('canvas') as HTMLCanvasElement;
  canvas.width = width;
  canvas.height = height;
  let context: CanvasRenderingContext2D | null = null;
  try {
    context = canvas.getContext('2d');
  } catch {
    context = null;
  }
  const element: HTMLElement = context ? canvas : doc.createElement('div');
  if (!context) {
    element.className = 'headless-surface';
  }
  const surface: PixelSurface = {
    element,
    width,
    height,
    drawn: null,
    draw(image: ImageBuffer) {
      surface.drawn = image;
      if (context) {
        const scaled = image.width === width && image.height === height
          ? image
          : downscale(image, Math.max(width, height));
        const pixels = new ImageData(
          new Uint8ClampedArray(scaled.data),
          scaled.width,
          scaled.height,
        );
        context.putImageData(pixels, 0, 0);
      }
    },
  };
  return surface;
}

export interface RenderOptions {
  doc: Document;
  onValue?: (value: ControlValue) => void;
  image?: ImageBuffer;
  surfaceFactory?: SurfaceFactory;
  thumbnailSize?: number;
}

export interface RenderedControl {
  root: HTMLElement;
  kind: string;
  error?: string;
}

const KNOWN_KINDS = new Set([
  'slider',
  'text_field',
  'dropdown',
  'radio_buttons',
  'preset_buttons',
  'color_wheel',
  'color_picker',
  'direct_click',
]);

function errorCard(doc: Document, kind: string, message: string): RenderedControl {
  const root = doc.createElement('div');
  root.className = 'control control-error';
  root.textContent = `Cannot render "${kind}": ${message}`;
  return { root, kind, error: message };
}

function shell(doc: Document, spec: ControlSpecDoc): HTMLElement {
  const root = doc.createElement('div');
  root.className = `control control-${spec.kind}`;
  const label = doc.createElement('label');
  label.className = 'control-label';
  label.textContent = spec.label;
  root.appendChild(label);
  return root;
}

/** Render one control spec; failures produce a visible error card, never a throw. */
export function renderControl(spec: ControlSpecDoc, opts: RenderOptions): RenderedControl {
  const doc = opts.doc;
  const emit = opts.onValue ?? (() => undefined);
  try {
    if (!KNOWN_KINDS.has(spec.kind)) {
      return errorCard(doc, spec.kind, 'unknown control kind');
    }
    const domain = spec.value_domain;
    switch (spec.kind) {
      case 'slider':
      case 'text_field': {
        if (domain.class !== 'continuous' && domain.class !== 'discrete') {
          return errorCard(doc, spec.kind, `needs a numeric domain, got ${domain.class}`);
        }
        if (domain.class === 'discrete') {
          return renderDiscreteInput(doc, spec, domain, emit);
        }
        return spec.kind === 'slider'
          ? renderSlider(doc, spec, domain, emit)
          : renderNumberField(doc, spec, domain, emit);
      }
      case 'dropdown': {
        if (domain.class !== 'discrete') {
          return errorCard(doc, spec.kind, `needs a discrete domain, got ${domain.class}`);
        }
        return renderDropdown(doc, spec, domain, emit);
      }
      case 'radio_buttons': {
        if (domain.class !== 'discrete') {
          return errorCard(doc, spec.kind, `needs a discrete domain, got ${domain.class}`);
        }
        return renderRadios(doc, spec, domain, emit);
      }
      case 'preset_buttons': {
        if (!spec.presets || spec.presets.length < 2) {
          return errorCard(doc, spec.kind, 'needs at least 2 presets');
        }
        return renderPresets(doc, spec, emit, opts);
      }
      case 'color_wheel': {
        if (domain.class !== 'color') {
          return errorCard(doc, spec.kind, `needs a color domain, got ${domain.class}`);
        }
        return renderColorWheel(doc, spec, emit, opts);
      }
      case 'color_picker': {
        if (domain.class !== 'color') {
          return errorCard(doc, spec.kind, `needs a color domain, got ${domain.class}`);
        }
        return renderColorPicker(doc, spec, emit);
      }
      case 'direct_click': {
        if (domain.class !== 'position') {
          return errorCard(doc, spec.kind, `needs a position domain, got ${domain.class}`);
        }
        return renderDirectClick(doc, spec, domain, emit, opts);
      }
    }
    return errorCard(doc, spec.kind, 'unhandled kind');
  } catch (err) {
    return errorCard(doc, spec.kind, err instanceof Error ? err.message : String(err));
  }
}

function renderSlider(
  doc: Document,
  spec: ControlSpecDoc,
  domain: ContinuousDomain,
  emit: (value: ControlValue) => void,
): RenderedControl {
  const root = shell(doc, spec);
  const input = doc.createElement('input') as HTMLInputElement;
  input.type = 'range';
  input.min = String(domain.min);
  input.max = String(domain.max);
  input.step = String(domain.step);
  input.value = String(domain.min);
  input.addEventListener('input', () => {
    const value = clampNumber(parseFloat(input.value), domain);
    emit(value);
  });
  root.appendChild(input);
  return { root, kind: spec.kind };
}

function renderNumberField(
  doc: Document,
  spec: ControlSpecDoc,
  domain: ContinuousDomain,
  emit: (value: ControlValue) => void,
): RenderedControl {
  const root = shell(doc, spec);
  const input = doc.createElement('input') as HTMLInputElement;
  input.type = 'number';
  input.min = String(domain.min);
  input.max = String(domain.max);
  input.step = String(domain.step);
  input.value = String(domain.min);
  input.addEventListener('change', () => {
    const parsed = parseFloat(input.value);
    if (Number.isNaN(parsed)) return;
    const value = clampNumber(parsed, domain);
    input.value = String(value);
    emit(value);
  });
  root.appendChild(input);
  return { root, kind: spec.kind };
}

function clampNumber(value: number, domain: ContinuousDomain): number {
  return Math.min(domain.max, Math.max(domain.min, value));
}

function renderDiscreteInput(
  doc: Document,
  spec: ControlSpecDoc,
  domain: DiscreteDomain,
  emit: (value: ControlValue) => void,
): RenderedControl {
  // numeric slider/text_field over a fixed option list degrades to a dropdown
  return renderDropdown(doc, spec, domain, emit);
}

function renderDropdown(
  doc: Document,
  spec: ControlSpecDoc,
  domain: DiscreteDomain,
  emit: (value: ControlValue) => void,
): RenderedControl {
  const root = shell(doc, spec);
  const select = doc.createElement('select') as HTMLSelectElement;
  for (const option of domain.options) {
    const el = doc.createElement('option') as HTMLOptionElement;
    el.value = String(option);
    el.textContent = String(option);
    select.appendChild(el);
  }
  select.addEventListener('change', () => {
    const raw = domain.options[select.selectedIndex];
    emit(raw as ControlValue);
  });
  root.appendChild(select);
  return { root, kind: spec.kind };
}

function renderRadios(
  doc: Document,
  spec: ControlSpecDoc,
  domain: DiscreteDomain,
  emit: (value: ControlValue) => void,
): RenderedControl {
  const root = shell(doc, spec);
  const group = doc.createElement('div');
  group.className = 'radio-group';
  const name = `radios-${spec.parameter}-${Math.random().toString(36).slice(2, 8)}`;
  domain.options.forEach((option) => {
    const label = doc.createElement('label');
    const input = doc.createElement('input') as HTMLInputElement;
    input.type = 'radio';
    input.name = name;
    input.value = String(option);
    input.addEventListener('change', () => {
      if (input.checked) emit(option as ControlValue);
    });
    label.appendChild(input);
    label.appendChild(doc.createTextNode(String(option)));
    group.appendChild(label);
  });
  root.appendChild(group);
  return { root, kind: spec.kind };
}

function renderPresets(
  doc: Document,
  spec: ControlSpecDoc,
  emit: (value: ControlValue) => void,
  opts: RenderOptions,
): RenderedControl {
  const root = shell(doc, spec);
  const row = doc.createElement('div');
  row.className = 'preset-row';
  const factory = opts.surfaceFactory ?? defaultSurfaceFactory;
  const size = Math.min(128, opts.thumbnailSize ?? 96);
  const base = opts.image ? downscale(opts.image, size) : null;
  for (const preset of spec.presets ?? []) {
    const button = doc.createElement('button') as HTMLButtonElement;
    button.type = 'button';
    button.className = 'preset-button';
    button.title = preset.preview || preset.caption;
    if (base) {
      // the thumbnail previews the preset applied to a downscaled copy
      const surface = factory(doc, base.width, base.height);
      surface.element.classList.add('preset-thumb');
      surface.draw(applyAdjustment(base, spec.parameter, Number(preset.value)));
      button.appendChild(surface.element);
    }
    const caption = doc.createElement('span');
    caption.textContent = preset.caption;
    button.appendChild(caption);
    button.addEventListener('click', () => emit(preset.value as ControlValue));
    row.appendChild(button);
  }
  root.appendChild(row);
  return { root, kind: spec.kind };
}

/** Hue disc: angle is the hue fraction, radius is saturation. */
export function colorWheelImage(size: number): ImageBuffer {
  const image = { width: size, height: size, data: new Uint8ClampedArray(size * size * 4) };
  const center = (size - 1) / 2;
  const radius = size / 2;
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const dx = x - center;
      const dy = y - center;
      const r = Math.sqrt(dx * dx + dy * dy);
      const i = (y * size + x) * 4;
      if (r <= radius) {
        const hue = (Math.atan2(dy, dx) / (2 * Math.PI) + 1) % 1;
        const [red, green, blue] = hsvToRgb(hue, Math.min(1, r / radius), 1);
        image.data[i] = red;
        image.data[i + 1] = green;
        image.data[i + 2] = blue;
        image.data[i + 3] = 255;
      }
    }
  }
  return image;
}

function pointerFraction(
  event: MouseEvent,
  element: HTMLElement,
  fallbackWidth: number,
  fallbackHeight: number,
): [number, number] {
  const rect = element.getBoundingClientRect?.();
  const left = rect && rect.width > 0 ? rect.left : 0;
  const top = rect && rect.height > 0 ? rect.top : 0;
  const width = rect && rect.width > 0 ? rect.width : fallbackWidth;
  const height = rect && rect.height > 0 ? rect.height : fallbackHeight;
  const x = Math.min(1, Math.max(0, (event.clientX - left) / width));
  const y = Math.min(1, Math.max(0, (event.clientY - top) / height));
  return [x, y];
}

function renderColorWheel(
  doc: Document,
  spec: ControlSpecDoc,
  emit: (value: ControlValue) => void,
  opts: RenderOptions,
): RenderedControl {
  const root = shell(doc, spec);
  const size = 160;
  const factory = opts.surfaceFactory ?? defaultSurfaceFactory;
  const surface = factory(doc, size, size);
  surface.element.classList.add('color-wheel');
  surface.draw(colorWheelImage(size));
  surface.element.addEventListener('click', (event) => {
    const [fx, fy] = pointerFraction(event as MouseEvent, surface.element, size, size);
    const dx = fx - 0.5;
    const dy = fy - 0.5;
    const hue = (Math.atan2(dy, dx) / (2 * Math.PI) + 1) % 1;
    emit(hue);
  });
  root.appendChild(surface.element);
  return { root, kind: spec.kind };
}

function renderColorPicker(
  doc: Document,
  spec: ControlSpecDoc,
  emit: (value: ControlValue) => void,
): RenderedControl {
  const root = shell(doc, spec);
  const input = doc.createElement('input') as HTMLInputElement;
  input.type = 'color';
  input.value = '#ffffff';
  input.addEventListener('input', () => emit(input.value));
  input.addEventListener('change', () => emit(input.value));
  root.appendChild(input);
  return { root, kind: spec.kind };
}

function renderDirectClick(
  doc: Document,
  spec: ControlSpecDoc,
  domain: PositionDomain,
  emit: (value: ControlValue) => void,
  opts: RenderOptions,
): RenderedControl {
  const root = shell(doc, spec);
  const width = 240;
  const height = 160;
  const factory = opts.surfaceFactory ?? defaultSurfaceFactory;
  const surface = factory(doc, width, height);
  surface.element.classList.add('click-target');
  if (opts.image) {
    surface.draw(downscale(opts.image, Math.max(width, height)));
  }
  surface.element.addEventListener('click', (event) => {
    const [fx, fy] = pointerFraction(event as MouseEvent, surface.element, width, height);
    emit({ x: fx * domain.width, y: fy * domain.height });
  });
  root.appendChild(surface.element);
  return { root, kind: spec.kind };
}
