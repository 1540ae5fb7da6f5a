import { describe, expect, it } from 'vitest';

import {
  applyAdjustment,
  cloneImage,
  createImage,
  downscale,
  hexToHue,
  hsvToRgb,
  pixelDelta,
  rgbToHsv,
  testImage,
} from '../src/image.js';

function onePixel(r: number, g: number, b: number) {
  const image = createImage(1, 1);
  image.data.set([r, g, b, 255]);
  return image;
}

describe('hsv round trip', () => {
  it('reconstructs arbitrary byte triples exactly', () => {
    let seed = 1234567;
    const next = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed % 256;
    };
    for (let i = 0; i < 20000; i++) {
      const r = next();
      const g = next();
      const b = next();
      const [h, s, v] = rgbToHsv(r, g, b);
      expect(hsvToRgb(h, s, v)).toEqual([r, g, b]);
    }
  });

  it('reconstructs ties and grays exactly', () => {
    for (const [r, g, b] of [
      [0, 0, 0],
      [255, 255, 255],
      [128, 128, 128],
      [200, 200, 10],
      [10, 200, 200],
      [200, 10, 200],
      [255, 255, 0],
      [0, 255, 255],
    ]) {
      const [h, s, v] = rgbToHsv(r, g, b);
      expect(hsvToRgb(h, s, v)).toEqual([r, g, b]);
    }
  });
});

describe('applyAdjustment', () => {
  it('hue shift 0 is pixel-identical', () => {
    const image = testImage();
    expect(pixelDelta(applyAdjustment(image, 'hue', 0), image)).toBe(0);
  });

  it('full-turn hue shift wraps back to identity', () => {
    const image = testImage();
    expect(pixelDelta(applyAdjustment(image, 'hue', 1), image)).toBe(0);
  });

  it('lightness factor 1.0 is pixel-identical', () => {
    const image = testImage();
    expect(pixelDelta(applyAdjustment(image, 'lightness', 1.0), image)).toBe(0);
  });

  it('saturation factor 1.0 is pixel-identical', () => {
    const image = testImage();
    expect(pixelDelta(applyAdjustment(image, 'saturation', 1.0), image)).toBe(0);
  });

  it('never mutates the source buffer', () => {
    const image = testImage();
    const before = cloneImage(image);
    applyAdjustment(image, 'hue', 0.37);
    applyAdjustment(image, 'lightness', 0.4);
    applyAdjustment(image, 'saturation', 1.8);
    expect(pixelDelta(image, before)).toBe(0);
  });

  it('half-wheel hue shift turns pure red to cyan', () => {
    // oracle: HSV round trip on a 1x1 image
    const red = onePixel(255, 0, 0);
    const shifted = applyAdjustment(red, 'hue', 0.5);
    const [r, g, b] = [shifted.data[0], shifted.data[1], shifted.data[2]];
    const [h] = rgbToHsv(r, g, b);
    expect(Math.abs(h - 0.5)).toBeLessThan(1e-9); // H moved by half the wheel
    expect([r, g, b]).toEqual([0, 255, 255]);
  });

  it('lightness scales channels multiplicatively with clamping', () => {
    const px = onePixel(200, 100, 50);
    const half = applyAdjustment(px, 'lightness', 0.5);
    expect([half.data[0], half.data[1], half.data[2]]).toEqual([100, 50, 25]);
    const blown = applyAdjustment(px, 'lightness', 10);
    expect(blown.data[0]).toBe(255); // clamped to channel range
  });

  it('saturation 0 produces grayscale', () => {
    const gray = applyAdjustment(onePixel(180, 40, 90), 'saturation', 0);
    expect(gray.data[0]).toBe(gray.data[1]);
    expect(gray.data[1]).toBe(gray.data[2]);
  });

  it('unknown parameters return an untouched copy', () => {
    const image = testImage(16, 16);
    const out = applyAdjustment(image, 'position', 0.7);
    expect(pixelDelta(out, image)).toBe(0);
    expect(out).not.toBe(image);
  });
});

describe('helpers', () => {
  it('downscale bounds the longest side and keeps aspect', () => {
    const image = testImage(200, 100);
    const small = downscale(image, 128);
    expect(Math.max(small.width, small.height)).toBeLessThanOrEqual(128);
    expect(small.width / small.height).toBeCloseTo(2, 1);
    const untouched = downscale(testImage(64, 48), 128);
    expect(untouched.width).toBe(64);
  });

  it('hexToHue reads primary colors', () => {
    expect(hexToHue('#ff0000')).toBeCloseTo(0, 6);
    expect(hexToHue('#00ff00')).toBeCloseTo(1 / 3, 6);
    expect(hexToHue('#0000ff')).toBeCloseTo(2 / 3, 6);
  });
});
