"""Per-model-family chat prompt rendering.

Templates are data, not code: the seven built-in families live in
``data/templates.json`` and users can register more from a config file of
the same shape without touching the package. A template renders as

    pre_user + instruction + post_user + assistant_prefix

where ``pre_user`` already contains the family's system preamble when it
has one (the ``system_preamble`` field records the preamble text). Marker
strings like "<|im_start|>" are opaque bytes; newlines are stored literally
in the JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DatasetFormatError, UnknownTemplateError

__all__ = [
    "ChatTemplate",
    "builtin_templates",
    "get_template",
    "load_templates",
    "render",
    "strip_eos",
]


@dataclass(frozen=True)
class ChatTemplate:
    name: str
    pre_user: str
    post_user: str
    eos_tokens: tuple[str, ...]
    system_preamble: str | None = None

    def __post_init__(self) -> None:
        if not self.eos_tokens:
            raise ValueError(f"template {self.name!r} declares no EOS tokens")

    @property
    def eos(self) -> str:
        """The token appended after assistant content in training text."""
        return self.eos_tokens[0]


def render(template: ChatTemplate, instruction: str, assistant_prefix: str = "") -> str:
    """Render a single-turn prompt, optionally continuing into an
    assistant prefix (no separator is inserted before the prefix)."""
    if not instruction:
        raise ValueError("instruction must be non-empty")
    return f"{template.pre_user}{instruction}{template.post_user}{assistant_prefix}"


def strip_eos(template: ChatTemplate, text: str) -> str:
    """Remove trailing EOS tokens (repeatedly) and trailing whitespace."""
    while True:
        trimmed = text.rstrip()
        for token in template.eos_tokens:
            if trimmed.endswith(token):
                trimmed = trimmed[: -len(token)]
        if trimmed == text:
            return text
        text = trimmed


def _template_from_dict(data: dict, origin: str) -> ChatTemplate:
    try:
        name = data["name"]
        pre_user = data["pre_user"]
        post_user = data["post_user"]
        eos_tokens = tuple(data["eos_tokens"])
    except (KeyError, TypeError) as exc:
        raise DatasetFormatError(f"bad template in {origin}: {exc}") from exc
    return ChatTemplate(
        name=name,
        pre_user=pre_user,
        post_user=post_user,
        eos_tokens=eos_tokens,
        system_preamble=data.get("system_preamble"),
    )


def load_templates(path: str | Path) -> dict[str, ChatTemplate]:
    """Load a template config file: {"templates": [{name, pre_user, ...}]}."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not isinstance(data.get("templates"), list):
        raise DatasetFormatError(f"{path}: expected an object with a 'templates' list")
    return {t.name: t for t in (_template_from_dict(d, str(path)) for d in data["templates"])}


def _load_builtins() -> dict[str, ChatTemplate]:
    raw = resources.files("tlgkit.data").joinpath("templates.json").read_text("utf-8")
    data = json.loads(raw)
    return {
        t.name: t
        for t in (_template_from_dict(d, "builtin templates") for d in data["templates"])
    }


_BUILTINS: dict[str, ChatTemplate] | None = None


def builtin_templates() -> dict[str, ChatTemplate]:
    global _BUILTINS
    if _BUILTINS is None:
        _BUILTINS = _load_builtins()
    return dict(_BUILTINS)


def get_template(name: str, extra: dict[str, ChatTemplate] | None = None) -> ChatTemplate:
    """Look up a template by name among builtins plus optional extras."""
    if extra and name in extra:
        return extra[name]
    builtins = builtin_templates()
    if name in builtins:
        return builtins[name]
    known = sorted(set(builtins) | set(extra or ()))
    raise UnknownTemplateError(f"unknown template {name!r}; known: {', '.join(known)}")
