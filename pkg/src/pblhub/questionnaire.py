"""The metacognitive self-report questionnaire.

Four fixed dimensions; the per-dimension prompts ship with sensible defaults
and can be replaced from a JSON config file ({dimension: [prompt, ...]}).
Dimensions are structural and cannot be added or removed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidConfig
from .model import Dimension

DEFAULT_PROMPTS: dict[Dimension, list[str]] = {
    Dimension.COGNITION: [
        "Activating prior knowledge",
        "Planning",
        "Creating sub-goals",
        "Learning strategies",
    ],
    Dimension.METACOGNITION: [
        "Feeling of knowing",
        "Judgment of learning",
        "Content evaluation",
    ],
    Dimension.MOTIVATION: [
        "Self-efficacy",
        "Task value",
        "Interest",
        "Effort",
    ],
    Dimension.BEHAVIOUR: [
        "Engaging in help-seeking behaviour",
        "Modifying learning conditions",
        "Handling task difficulties and demands",
    ],
}


@dataclass(frozen=True)
class Questionnaire:
    prompts: dict[Dimension, tuple[str, ...]]

    @classmethod
    def default(cls) -> "Questionnaire":
        return cls(prompts={d: tuple(v) for d, v in DEFAULT_PROMPTS.items()})

    @classmethod
    def from_file(cls, path: str | Path) -> "Questionnaire":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidConfig(f"questionnaire file unreadable: {exc}") from exc
        if not isinstance(raw, dict):
            raise InvalidConfig("questionnaire must map dimension -> prompt list")
        prompts: dict[Dimension, tuple[str, ...]] = {}
        for key, value in raw.items():
            try:
                dim = Dimension(key)
            except ValueError:
                raise InvalidConfig(f"unknown dimension {key!r}") from None
            if not isinstance(value, list) or not value or not all(isinstance(p, str) for p in value):
                raise InvalidConfig(f"dimension {key}: prompts must be a non-empty string list")
            prompts[dim] = tuple(value)
        missing = set(Dimension) - set(prompts)
        if missing:
            raise InvalidConfig(f"missing dimensions: {sorted(d.value for d in missing)}")
        return cls(prompts=prompts)

    def knows(self, dimension: Dimension, prompt: str) -> bool:
        return prompt in self.prompts.get(dimension, ())

    def to_doc(self) -> dict[str, list[str]]:
        return {d.value: list(p) for d, p in self.prompts.items()}
