// Client-side pixel operations on plain RGBA buffers.
//
// All transforms are pure: they read one buffer and return a fresh one, so
// the session's source asset is never mutated. Hue edits shift the hue
// fraction and wrap around the wheel; lightness and saturation are
// multiplicative scalings clamped to the channel range.

export interface ImageBuffer {
  width: number;
  height: number;
  data: Uint8ClampedArray; // RGBA, row-major
}

export function createImage(width: number, height: number): ImageBuffer {
  return { width, height, data: new Uint8ClampedArray(width * height * 4) };
}

export function cloneImage(image: ImageBuffer): ImageBuffer {
  return {
    width: image.width,
    height: image.height,
    data: new Uint8ClampedArray(image.data),
  };
}

/** Deterministic sample picture: hue sweep with lightness bands. */
export function testImage(width = 96, height = 64): ImageBuffer {
  const image = createImage(width, height);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const h = x / width;
      const v = 0.35 + 0.6 * (y / Math.max(1, height - 1));
      const s = y % 8 < 4 ? 0.9 : 0.55;
      const [r, g, b] = hsvToRgb(h, s, v);
      const i = (y * width + x) * 4;
      image.data[i] = r;
      image.data[i + 1] = g;
      image.data[i + 2] = b;
      image.data[i + 3] = 255;
    }
  }
  return image;
}

/** Hue as a fraction of a full turn in [0, 1); s and v in [0, 1]. */
export function rgbToHsv(r: number, g: number, b: number): [number, number, number] {
  const max = Math.max(r, g, b);
  const min = Math.min(r, g, b);
  const chroma = max - min;
  let h = 0;
  if (chroma > 0) {
    if (max === r) h = ((g - b) / chroma + 6) % 6;
    else if (max === g) h = (b - r) / chroma + 2;
    else h = (r - g) / chroma + 4;
    h /= 6;
  }
  const s = max === 0 ? 0 : chroma / max;
  return [h, s, max / 255];
}

export function hsvToRgb(h: number, s: number, v: number): [number, number, number] {
  h = ((h % 1) + 1) % 1;
  const value = v * 255;
  const chroma = value * s;
  const sector = h * 6;
  const x = chroma * (1 - Math.abs((sector % 2) - 1));
  let r = 0;
  let g = 0;
  let b = 0;
  if (sector < 1) [r, g, b] = [chroma, x, 0];
  else if (sector < 2) [r, g, b] = [x, chroma, 0];
  else if (sector < 3) [r, g, b] = [0, chroma, x];
  else if (sector < 4) [r, g, b] = [0, x, chroma];
  else if (sector < 5) [r, g, b] = [x, 0, chroma];
  else [r, g, b] = [chroma, 0, x];
  const m = value - chroma;
  return [Math.round(r + m), Math.round(g + m), Math.round(b + m)];
}

export function hexToHue(hex: string): number {
  const clean = hex.replace('#', '');
  const r = parseInt(clean.slice(0, 2), 16);
  const g = parseInt(clean.slice(2, 4), 16);
  const b = parseInt(clean.slice(4, 6), 16);
  return rgbToHsv(r, g, b)[0];
}

const clampByte = (value: number) => Math.max(0, Math.min(255, Math.round(value)));

/**
 * Pure per-pixel edit. Known parameters:
 *  - "hue": value in [0, 1] shifts the hue fraction, wrapping around the wheel
 *  - "saturation": multiplicative scaling of S, clamped to [0, 1]
 *  - "lightness": multiplicative channel scaling, clamped to the byte range
 * Anything else returns an untouched copy (the preview simply does not move).
 */
export function applyAdjustment(
  image: ImageBuffer,
  parameter: string,
  value: number,
): ImageBuffer {
  const out = cloneImage(image);
  const data = out.data;
  if (parameter === 'hue') {
    for (let i = 0; i < data.length; i += 4) {
      const [h, s, v] = rgbToHsv(data[i], data[i + 1], data[i + 2]);
      const shifted = (((h + value) % 1) + 1) % 1;
      const [r, g, b] = hsvToRgb(shifted, s, v);
      data[i] = r;
      data[i + 1] = g;
      data[i + 2] = b;
    }
  } else if (parameter === 'saturation') {
    for (let i = 0; i < data.length; i += 4) {
      const [h, s, v] = rgbToHsv(data[i], data[i + 1], data[i + 2]);
      const [r, g, b] = hsvToRgb(h, Math.max(0, Math.min(1, s * value)), v);
      data[i] = r;
      data[i + 1] = g;
      data[i + 2] = b;
    }
  } else if (parameter === 'lightness') {
    for (let i = 0; i < data.length; i += 4) {
      data[i] = clampByte(data[i] * value);
      data[i + 1] = clampByte(data[i + 1] * value);
      data[i + 2] = clampByte(data[i + 2] * value);
    }
  }
  return out;
}

/** Largest absolute channel difference between two equal-sized buffers. */
export function pixelDelta(a: ImageBuffer, b: ImageBuffer): number {
  if (a.width !== b.width || a.height !== b.height) {
    throw new Error('buffers differ in size');
  }
  let worst = 0;
  for (let i = 0; i < a.data.length; i++) {
    const diff = Math.abs(a.data[i] - b.data[i]);
    if (diff > worst) worst = diff;
  }
  return worst;
}

/** Nearest-neighbor downscale so that max(width, height) <= maxSize. */
export function downscale(image: ImageBuffer, maxSize: number): ImageBuffer {
  const scale = Math.min(1, maxSize / Math.max(image.width, image.height));
  if (scale >= 1) return cloneImage(image);
  const width = Math.max(1, Math.round(image.width * scale));
  const height = Math.max(1, Math.round(image.height * scale));
  const out = createImage(width, height);
  for (let y = 0; y < height; y++) {
    const sy = Math.min(image.height - 1, Math.floor((y / height) * image.height));
    for (let x = 0; x < width; x++) {
      const sx = Math.min(image.width - 1, Math.floor((x / width) * image.width));
      const src = (sy * image.width + sx) * 4;
      const dst = (y * width + x) * 4;
      out.data[dst] = image.data[src];
      out.data[dst + 1] = image.data[src + 1];
      out.data[dst + 2] = image.data[src + 2];
      out.data[dst + 3] = image.data[src + 3];
    }
  }
  return out;
}
