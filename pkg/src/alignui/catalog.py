"""Closed vocabulary of UI control kinds and per-control specifications.

Every control recommendation produced anywhere in the engine must name one of
the eight kinds below; free-text tokens coming back from a model are
canonicalized through :func:`parse_kind` and anything off-catalog is rejected
so downstream stages only ever see implementable controls.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from numbers import Real
from typing import Union

SYNONYM_TABLE_VERSION = 1


class ControlKind(Enum):
    """The eight admissible control kinds, in canonical enumeration order."""

    SLIDER = "slider"
    TEXT_FIELD = "text_field"
    DROPDOWN = "dropdown"
    RADIO_BUTTONS = "radio_buttons"
    PRESET_BUTTONS = "preset_buttons"
    COLOR_WHEEL = "color_wheel"
    COLOR_PICKER = "color_picker"
    DIRECT_CLICK = "direct_click"


class UnknownControl(ValueError):
    """A token that does not name any kind in the catalog."""

    def __init__(self, name: str):
        super().__init__(f"unknown control kind: {name!r}")
        self.name = name


#: Human-facing labels used in prompts and rendered UIs.
DISPLAY_NAMES = {
    ControlKind.SLIDER: "Slider",
    ControlKind.TEXT_FIELD: "Text Field",
    ControlKind.DROPDOWN: "Drop-down Menu",
    ControlKind.RADIO_BUTTONS: "Radio Buttons",
    ControlKind.PRESET_BUTTONS: "Preset Buttons",
    ControlKind.COLOR_WHEEL: "Color Wheel",
    ControlKind.COLOR_PICKER: "Color Picker",
    ControlKind.DIRECT_CLICK: "Direct Click",
}

#: Which class of value domain each kind edits (serialized into catalog.json).
VALUE_DOMAIN_CLASSES = {
    ControlKind.SLIDER: "continuous",
    ControlKind.TEXT_FIELD: "continuous",
    ControlKind.DROPDOWN: "discrete",
    ControlKind.RADIO_BUTTONS: "discrete",
    ControlKind.PRESET_BUTTONS: "discrete",
    ControlKind.COLOR_WHEEL: "color",
    ControlKind.COLOR_PICKER: "color",
    ControlKind.DIRECT_CLICK: "position",
}

# Versioned synonym data, not fuzzy matching: these are the spellings we have
# actually seen models and humans produce for each kind. Matching is
# case-insensitive and ignores spaces, hyphens, and underscores.
SYNONYMS: dict[ControlKind, tuple[str, ...]] = {
    ControlKind.SLIDER: ("sliders", "float slider", "range slider"),
    ControlKind.TEXT_FIELD: (
        "text box",
        "textbox",
        "text input",
        "input field",
        "numeric field",
        "bounded float text",
    ),
    ControlKind.DROPDOWN: (
        "drop-down menu",
        "dropdown menu",
        "drop-down",
        "drop down",
        "select menu",
        "select",
    ),
    ControlKind.RADIO_BUTTONS: ("radio button", "radio", "radio group"),
    ControlKind.PRESET_BUTTONS: (
        "preset button",
        "presets",
        "preset buttons with preview overlays",
        "preset buttons with visual overlays",
        "preview preset buttons",
    ),
    ControlKind.COLOR_WHEEL: ("colour wheel", "hue wheel"),
    ControlKind.COLOR_PICKER: ("colour picker", "colorpicker"),
    ControlKind.DIRECT_CLICK: (
        "clicking",
        "click",
        "click on image",
        "clicking on the image",
        "direct manipulation",
        "image click",
    ),
}

_SEPARATORS = re.compile(r"[\s_\-]+")


def _normalize(name: str) -> str:
    return _SEPARATORS.sub("", name.strip().lower())


def _build_lookup() -> dict[str, ControlKind]:
    lookup: dict[str, ControlKind] = {}
    for kind in ControlKind:
        lookup[_normalize(kind.value)] = kind
        lookup[_normalize(DISPLAY_NAMES[kind])] = kind
        for alias in SYNONYMS[kind]:
            lookup[_normalize(alias)] = kind
    return lookup


_LOOKUP = _build_lookup()


def default_catalog() -> list[ControlKind]:
    """All eight control kinds, exactly once, in canonical order."""
    return list(ControlKind)


def canonical_name(kind: ControlKind) -> str:
    return kind.value


def parse_kind(name: str) -> ControlKind:
    """Canonicalize a free-text control name.

    Case-insensitive and insensitive to space/hyphen/underscore separators;
    recognizes the declared synonym table. Raises :class:`UnknownControl` for
    anything else, which is how off-catalog model output gets filtered.
    """
    kind = _LOOKUP.get(_normalize(name))
    if kind is None:
        raise UnknownControl(name)
    return kind


# --- value domains -----------------------------------------------------------


@dataclass(frozen=True)
class Continuous:
    """A real-valued range stepped in parameter units."""

    min: float
    max: float
    step: float
    unit: str = ""


@dataclass(frozen=True)
class Discrete:
    """A fixed option list."""

    options: tuple = ()


@dataclass(frozen=True)
class ColorSpace:
    """Hex-triplet color space (full hue circle by default)."""

    notation: str = "hex"


@dataclass(frozen=True)
class Position:
    """2D normalized coordinates in the unit square."""

    width: float = 1.0
    height: float = 1.0


ValueDomain = Union[Continuous, Discrete, ColorSpace, Position]


@dataclass(frozen=True)
class Preset:
    value: object
    caption: str
    preview: str = ""


@dataclass(frozen=True)
class ControlSpec:
    """Parameterized specification of one rendered control."""

    kind: ControlKind
    label: str
    parameter: str
    value_domain: ValueDomain
    presets: tuple[Preset, ...] = ()


_DOMAIN_COMPAT = {
    ControlKind.SLIDER: (Continuous, Discrete),
    ControlKind.TEXT_FIELD: (Continuous, Discrete),
    ControlKind.DROPDOWN: (Discrete,),
    ControlKind.RADIO_BUTTONS: (Discrete,),
    # preset buttons may parameterize any domain; the presets carry the values
    ControlKind.PRESET_BUTTONS: (Continuous, Discrete, ColorSpace, Position),
    ControlKind.COLOR_WHEEL: (ColorSpace,),
    ControlKind.COLOR_PICKER: (ColorSpace,),
    ControlKind.DIRECT_CLICK: (Position,),
}


def validate_spec(spec: ControlSpec) -> list[str]:
    """Return every violated spec invariant; an empty list means ok.

    Total over any field combination: violations are data, never exceptions.
    """
    violations: list[str] = []
    domain = spec.value_domain

    if isinstance(domain, Continuous):
        if not domain.min < domain.max:
            violations.append("continuous domain requires min < max")
        if not domain.step > 0:
            violations.append("continuous domain requires step > 0")
        elif domain.min < domain.max and domain.step > domain.max - domain.min:
            violations.append("continuous domain requires step <= (max - min)")
    elif isinstance(domain, Discrete):
        if not domain.options:
            violations.append("discrete domain requires a non-empty option list")
        elif len(set(domain.options)) != len(domain.options):
            violations.append("discrete domain options must be unique")

    if spec.kind is ControlKind.PRESET_BUTTONS:
        if len(spec.presets) < 2:
            violations.append("preset_buttons specs carry >= 2 presets")
    elif spec.presets:
        violations.append("only preset_buttons specs carry presets")

    allowed = _DOMAIN_COMPAT.get(spec.kind, ())
    if not isinstance(domain, allowed):
        names = "/".join(cls.__name__ for cls in allowed)
        violations.append(
            f"{spec.kind.value} is incompatible with "
            f"{type(domain).__name__} (expects {names})"
        )
    elif spec.kind in (ControlKind.SLIDER, ControlKind.TEXT_FIELD):
        if isinstance(domain, Discrete) and not all(
            isinstance(opt, Real) and not isinstance(opt, bool)
            for opt in domain.options
        ):
            violations.append(f"{spec.kind.value} requires numeric discrete options")

    return violations


# --- serialization (catalog.json) --------------------------------------------


def catalog_document() -> list[dict]:
    """Catalog plus synonym table as the catalog.json array."""
    return [
        {
            "kind": kind.value,
            "canonical_name": canonical_name(kind),
            "display_name": DISPLAY_NAMES[kind],
            "synonyms": list(SYNONYMS[kind]),
            "value_domain_class": VALUE_DOMAIN_CLASSES[kind],
        }
        for kind in ControlKind
    ]


def save_catalog() -> bytes:
    """catalog.json bytes: the array form of :func:`catalog_document`."""
    return (json.dumps(catalog_document(), indent=2) + "\n").encode("utf-8")


def _domain_to_json(domain: ValueDomain) -> dict:
    if isinstance(domain, Continuous):
        return {
            "class": "continuous",
            "min": domain.min,
            "max": domain.max,
            "step": domain.step,
            "unit": domain.unit,
        }
    if isinstance(domain, Discrete):
        return {"class": "discrete", "options": list(domain.options)}
    if isinstance(domain, ColorSpace):
        return {"class": "color", "notation": domain.notation}
    return {"class": "position", "width": domain.width, "height": domain.height}


def spec_to_json(spec: ControlSpec) -> dict:
    """JSON-able form of one ControlSpec (the wire shape the studio renders)."""
    doc = {
        "kind": spec.kind.value,
        "label": spec.label,
        "parameter": spec.parameter,
        "value_domain": _domain_to_json(spec.value_domain),
    }
    if spec.presets:
        doc["presets"] = [
            {"value": p.value, "caption": p.caption, "preview": p.preview}
            for p in spec.presets
        ]
    return doc
