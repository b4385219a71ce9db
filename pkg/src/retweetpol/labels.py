"""The two community labels used across the pipeline."""

from __future__ import annotations

from enum import Enum


class Label(str, Enum):
    NOVAX = "novax"
    PROVAX = "provax"

    def opposite(self) -> "Label":
        return Label.PROVAX if self is Label.NOVAX else Label.NOVAX


def parse_label(text: str) -> Label:
    t = text.strip().lower()
    if t == "novax":
        return Label.NOVAX
    if t == "provax":
        return Label.PROVAX
    raise ValueError(f"unknown label {text!r}; expected novax or provax")
