import type { ControlSpecDoc } from '../src/types.js';

// The full kind x domain matrix as emitted by the abstract-spec route.
export const DEFAULT_SPECS: ControlSpecDoc[] = [
  {
    kind: 'slider',
    label: 'Slider',
    parameter: 'lightness',
    value_domain: { class: 'continuous', min: 0.0, max: 1.0, step: 0.01, unit: '' },
  },
  {
    kind: 'text_field',
    label: 'Text Field',
    parameter: 'lightness',
    value_domain: { class: 'continuous', min: 0.0, max: 1.0, step: 0.01, unit: '' },
  },
  {
    kind: 'dropdown',
    label: 'Dropdown',
    parameter: 'hue',
    value_domain: { class: 'discrete', options: [0.0, 0.2, 0.4, 0.6, 0.8] },
  },
  {
    kind: 'radio_buttons',
    label: 'Radio Buttons',
    parameter: 'hue',
    value_domain: { class: 'discrete', options: [0.0, 0.2, 0.4, 0.6, 0.8] },
  },
  {
    kind: 'preset_buttons',
    label: 'Preset Buttons',
    parameter: 'hue',
    value_domain: { class: 'discrete', options: [0.0, 0.2, 0.4, 0.6, 0.8] },
    presets: [
      { value: 0.0, caption: '0.0', preview: 'red' },
      { value: 0.2, caption: '0.2', preview: 'green' },
      { value: 0.4, caption: '0.4', preview: 'cyan' },
      { value: 0.6, caption: '0.6', preview: 'blue' },
      { value: 0.8, caption: '0.8', preview: 'magenta' },
    ],
  },
  {
    kind: 'color_wheel',
    label: 'Color Wheel',
    parameter: 'hue',
    value_domain: { class: 'color', notation: 'hex' },
  },
  {
    kind: 'color_picker',
    label: 'Color Picker',
    parameter: 'hue',
    value_domain: { class: 'color', notation: 'hex' },
  },
  {
    kind: 'direct_click',
    label: 'Direct Click',
    parameter: 'position',
    value_domain: { class: 'position', width: 1.0, height: 1.0 },
  },
];
