"""Prompt templates shipped with the package, rendered with Jinja2."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

import jinja2

_env = jinja2.Environment(undefined=jinja2.StrictUndefined, keep_trailing_newline=False, autoescape=False)


@lru_cache(maxsize=None)
def load(name: str) -> str:
    """Raw template text, e.g. ``load("judge_clarity.system")``."""
    return resources.files(__package__).joinpath(f"{name}.txt").read_text(encoding="utf-8")


def render(name: str, **variables: object) -> str:
    return _env.from_string(load(name)).render(**variables).strip()


def available() -> list[str]:
    root = resources.files(__package__)
    names = []
    for entry in root.iterdir():
        if entry.name.endswith(".txt"):
            names.append(entry.name[: -len(".txt")])
    for entry in root.joinpath("baselines").iterdir():
        if entry.name.endswith(".txt"):
            names.append("baselines/" + entry.name[: -len(".txt")])
    return sorted(names)
