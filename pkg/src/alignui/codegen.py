"""Control implementation stage: guided code generation plus abstract specs.

Two output routes. The model route asks for runnable notebook-widget code,
steered by one example implementation per control kind (which is what keeps
syntax errors down), and mechanically lints the returned envelope. The
deterministic route emits validated abstract ControlSpec values that the
studio frontend renders directly; generated code is never executed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .catalog import (
    ColorSpace,
    Continuous,
    ControlKind,
    ControlSpec,
    Discrete,
    Position,
    Preset,
    UnknownControl,
    canonical_name,
    parse_kind,
    validate_spec,
)
from .dataset import TaskEntry
from .gateway import ChatRequest, Gateway, NoJsonFound, ParseError, extract_json
from .reasoning import ReasoningOutcome, WeightedRecommendation

ENVELOPE_KEYS = ("task", "control_type", "control_code")


class SchemaError(ValueError):
    pass


class MissingExample(KeyError):
    def __init__(self, kind: ControlKind):
        super().__init__(f"guidance corpus has no example for {kind.value}")
        self.kind = kind


class LintError(ValueError):
    def __init__(self, findings: list[str]):
        super().__init__("; ".join(findings))
        self.findings = findings


@dataclass(frozen=True)
class CodeGuidance:
    """Per-kind example code handed to the model as implementation guidance."""

    language_label: str
    example_corpus: Mapping[ControlKind, str]
    envelope_keys: tuple[str, ...] = ENVELOPE_KEYS


@dataclass(frozen=True)
class GeneratedUI:
    task: str
    kinds: tuple[ControlKind, ...]
    code_text: Optional[str] = None
    specs: tuple[ControlSpec, ...] = ()


_EXAMPLES: dict[ControlKind, str] = {
    ControlKind.SLIDER: """\
slider_label = controls.Label(value='Slider:')
slider = controls.FloatSlider(value=0.0, min=0.0, max=1.0, step=0.01)
slider.observe(on_value_change, names='value')""",
    ControlKind.TEXT_FIELD: """\
text_field_label = controls.Label(value='Text Field:')
text_field = controls.BoundedFloatText(value=0.0, min=0.0, max=1.0, step=0.01)
text_field.observe(on_value_change, names='value')""",
    ControlKind.DROPDOWN: """\
dropdown_label = controls.Label(value='Dropdown:')
dropdown = controls.Dropdown(options=[0.0, 0.2, 0.4, 0.6, 0.8], value=0.0)
dropdown.observe(on_value_change, names='value')""",
    ControlKind.RADIO_BUTTONS: """\
radio_buttons_label = controls.Label(value='Radio Buttons:')
radio_buttons = controls.RadioButtons(options=[0.0, 0.2, 0.4, 0.6, 0.8], value=0.0)
radio_buttons.observe(on_value_change, names='value')""",
    ControlKind.PRESET_BUTTONS: """\
preset_label = controls.Label(value='Preset buttons:')
preset_values = [
    (0.0, 'red'),
    (0.2, 'green'),
    (0.4, 'cyan'),
    (0.6, 'blue'),
    (0.8, 'magenta')
]
preset_buttons = [
    controls.Button(
        description=f"{value}",
        layout=controls.Layout(width='75px', height='30px'),
        style={'button_color': color}
    )
    for value, color in preset_values
]
for button in preset_buttons:
    button.on_click(lambda button: on_preset_click(button.description))
preset_buttons_box = controls.HBox(preset_buttons)""",
    ControlKind.COLOR_WHEEL: """\
color_wheel_label = controls.Label(value='Color Wheel:')
color_wheel = controls.Output()
with color_wheel:
    fig, ax = plt.subplots(figsize=(1.5, 1.5))
    theta = np.linspace(0, 2 * np.pi, 360, endpoint=False)
    colors = plt.cm.hsv(theta / (2 * np.pi))
    for i in range(360):
        wedge = Wedge(center=(0, 0), r=1, theta1=i, theta2=i + 1, color=colors[i])
        ax.add_patch(wedge)
    ax.set_aspect('equal')
    ax.axis('off')
    fig.canvas.mpl_connect('button_press_event', on_wheel_click)
    plt.show()""",
    ControlKind.COLOR_PICKER: """\
color_picker_label = controls.Label(value='Color Picker:')
color_picker = controls.ColorPicker(concise=True, value='#ffffff', disabled=False)
color_picker.observe(on_color_change, names='value')""",
    ControlKind.DIRECT_CLICK: """\
click_label = controls.Label(value='Click on the image:')
click_area = controls.Output()
def on_image_click(event):
    if event.inaxes:
        x = event.xdata / image.width
        y = event.ydata / image.height
        on_position_change(x, y)
fig.canvas.mpl_connect('button_press_event', on_image_click)""",
}


def default_guidance() -> CodeGuidance:
    """Guidance covering the whole catalog, in the notebook-widget idiom."""
    return CodeGuidance(language_label="python-notebook-widgets", example_corpus=dict(_EXAMPLES))


CODEGEN_SYSTEM_PROMPT = """\
You are expert at generating code for the offered UI controls to perform the specified task. You should follow the steps below for the code generation.

First, the UI control code you provide must allow users to perform the task specified in the content of user task.

Second, the UI control code you provide must refer to the example code for the implementation.

Third, organize your response in JSON format following the example responses below. Replace the content in "task", "control_type", and "control_code" with the actual information.
{
    "task": "Adjust image hue",
    "control_type": "Slider, Dropdown, Radio Buttons, Text Field, Preset Buttons, Color Wheel, Color Picker",
    "control_code": "<the implementation code as one string>"
}"""

RecommendationLike = Union[WeightedRecommendation, ReasoningOutcome, Iterable[ControlKind]]


def _kinds_of(recommendation: RecommendationLike) -> list[ControlKind]:
    if isinstance(recommendation, WeightedRecommendation):
        return recommendation.kinds()
    if isinstance(recommendation, ReasoningOutcome):
        seen = {kind for picks in recommendation.per_aspect.values() for kind, _ in picks}
        return [kind for kind in ControlKind if kind in seen]
    seen = set(recommendation)
    return [kind for kind in ControlKind if kind in seen]


def _task_of(recommendation: RecommendationLike) -> str:
    if isinstance(recommendation, WeightedRecommendation):
        return recommendation.task
    return ""


def build_codegen_prompt(
    recommendation: RecommendationLike,
    guidance: CodeGuidance,
    task_description: Optional[str] = None,
) -> tuple[str, str]:
    """Assemble (system_prompt, user_prompt) for the code-generation call.

    The user prompt carries the task, the recommended control types, and the
    guidance example for each recommended kind. Pure function of its inputs.
    """
    kinds = _kinds_of(recommendation)
    if not kinds:
        raise ValueError("recommendation is empty")
    for kind in kinds:
        if kind not in guidance.example_corpus:
            raise MissingExample(kind)

    task = task_description or _task_of(recommendation) or "the user task"
    parts = [
        f"The content of user task: {task}",
        "",
        "The UI controls to implement: "
        + ", ".join(canonical_name(kind) for kind in kinds)
        + ".",
        "",
        f"Example code ({guidance.language_label}):",
    ]
    for kind in kinds:
        parts.append(f"# {canonical_name(kind)}")
        parts.append(guidance.example_corpus[kind])
        parts.append("")
    return CODEGEN_SYSTEM_PROMPT, "\n".join(parts).rstrip("\n")


def _code_as_text(control_code) -> str:
    if isinstance(control_code, str):
        return control_code
    if isinstance(control_code, dict):
        return "\n\n".join(str(v) for v in control_code.values())
    return ""


def lint_generated(envelope: dict) -> list[str]:
    """Mechanical checks over a generated envelope; empty list means ok."""
    findings: list[str] = []
    for key in ENVELOPE_KEYS:
        if key not in envelope:
            findings.append(f"{key} missing")
    if "control_type" in envelope:
        tokens = [t.strip() for t in str(envelope["control_type"]).split(",")]
        for token in tokens:
            if not token:
                findings.append("empty control_type token")
                continue
            try:
                parse_kind(token)
            except UnknownControl:
                findings.append(f'off-catalog control type "{token}"')
    if "control_code" in envelope:
        code = envelope["control_code"]
        if isinstance(code, dict):
            if not code or any(not str(v).strip() for v in code.values()):
                findings.append("empty code")
        elif not isinstance(code, str) or not code.strip():
            findings.append("empty code")
    return findings


def generate_code(
    recommendation: RecommendationLike,
    guidance: CodeGuidance,
    gateway: Gateway,
    task_description: Optional[str] = None,
) -> GeneratedUI:
    """Model route: request widget code and lint the returned envelope."""
    system, user = build_codegen_prompt(recommendation, guidance, task_description)
    response = gateway.complete(ChatRequest(system_prompt=system, user_prompt=user))
    try:
        envelope = extract_json(response.text)
    except (NoJsonFound, ParseError) as exc:
        raise SchemaError(f"no envelope JSON in response: {exc}") from exc
    findings = lint_generated(envelope)
    if findings:
        raise LintError(findings)
    kinds = tuple(
        parse_kind(token.strip())
        for token in str(envelope["control_type"]).split(",")
        if token.strip()
    )
    return GeneratedUI(
        task=str(envelope["task"]),
        kinds=kinds,
        code_text=_code_as_text(envelope["control_code"]),
    )


# --- deterministic abstract-spec route --------------------------------------------

PRESET_VALUES = (
    (0.0, "red"),
    (0.2, "green"),
    (0.4, "cyan"),
    (0.6, "blue"),
    (0.8, "magenta"),
)

_DISCRETE_OPTIONS = tuple(value for value, _ in PRESET_VALUES)


def _default_parameter(task_entry: Optional[TaskEntry]) -> str:
    if task_entry is None:
        return "value"
    return task_entry.name.rsplit("_", 1)[-1] or "value"


def _spec_for(kind: ControlKind, parameter: str) -> ControlSpec:
    label = canonical_name(kind).replace("_", " ").title()
    if kind in (ControlKind.SLIDER, ControlKind.TEXT_FIELD):
        return ControlSpec(kind, label, parameter, Continuous(0.0, 1.0, 0.01))
    if kind in (ControlKind.DROPDOWN, ControlKind.RADIO_BUTTONS):
        return ControlSpec(kind, label, parameter, Discrete(_DISCRETE_OPTIONS))
    if kind is ControlKind.PRESET_BUTTONS:
        presets = tuple(
            Preset(value=value, caption=str(value), preview=color)
            for value, color in PRESET_VALUES
        )
        return ControlSpec(kind, label, parameter, Discrete(_DISCRETE_OPTIONS), presets)
    if kind in (ControlKind.COLOR_WHEEL, ControlKind.COLOR_PICKER):
        return ControlSpec(kind, label, parameter, ColorSpace())
    return ControlSpec(kind, label, parameter, Position())


def emit_abstract_spec(
    recommendation: RecommendationLike,
    task_entry: Optional[TaskEntry] = None,
) -> list[ControlSpec]:
    """Deterministic route: one validated ControlSpec per recommended kind."""
    kinds = _kinds_of(recommendation)
    if not kinds:
        raise ValueError("recommendation is empty")
    parameter = _default_parameter(task_entry)
    specs = [_spec_for(kind, parameter) for kind in kinds]
    for spec in specs:
        violations = validate_spec(spec)
        assert not violations, f"default spec for {spec.kind.value} invalid: {violations}"
    return specs
