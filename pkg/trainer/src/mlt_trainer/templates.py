"""Chat template loading, shared file format with the benchmark toolkit.

A template config is JSON of the shape
``{"templates": [{"name", "pre_user", "post_user", "system_preamble",
"eos_tokens"}, ...]}``; a prompt renders as pre_user + instruction +
post_user and the assistant span follows directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ChatTemplate:
    name: str
    pre_user: str
    post_user: str
    eos_tokens: tuple[str, ...]
    system_preamble: str | None = None

    @property
    def eos(self) -> str:
        return self.eos_tokens[0]

    def prompt(self, instruction: str) -> str:
        return f"{self.pre_user}{instruction}{self.post_user}"


def load_template(path: str | Path, name: str | None = None) -> ChatTemplate:
    """Load one template from a config file (the first one by default)."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    entries = data["templates"]
    if name is not None:
        entries = [e for e in entries if e["name"] == name]
        if not entries:
            raise KeyError(f"no template named {name!r} in {path}")
    entry = entries[0]
    return ChatTemplate(
        name=entry["name"],
        pre_user=entry["pre_user"],
        post_user=entry["post_user"],
        eos_tokens=tuple(entry["eos_tokens"]),
        system_preamble=entry.get("system_preamble"),
    )


def save_template(template: ChatTemplate, path: str | Path) -> None:
    data = {
        "templates": [
            {
                "name": template.name,
                "pre_user": template.pre_user,
                "post_user": template.post_user,
                "system_preamble": template.system_preamble,
                "eos_tokens": list(template.eos_tokens),
            }
        ]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
