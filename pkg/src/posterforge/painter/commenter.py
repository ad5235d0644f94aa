"""Panel critics: the vision-model commenter and an estimate-based stand-in."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from importlib import resources
from typing import Protocol

from PIL import Image

from .. import prompts
from ..gateway import Gateway, ModelRequest
from ..gateway.schemas import BulletBlock
from ..imaging import ImageInput, image_bytes
from ..layout.tree import Box
from .fit import Verdict, estimate_fit

log = logging.getLogger(__name__)

NEGATIVE_REFERENCE = "overflow_example.png"
POSITIVE_REFERENCE = "good_example.png"


@dataclass(frozen=True)
class References:
    negative: bytes
    positive: bytes


def bundled_references() -> References:
    root = resources.files("posterforge.painter") / "assets"
    return References(
        (root / NEGATIVE_REFERENCE).read_bytes(),
        (root / POSITIVE_REFERENCE).read_bytes(),
    )


def parse_verdict(text: str) -> Verdict | None:
    token = text.strip().strip("\"'`. ")
    if token in ("1", "2", "3"):
        return Verdict(int(token))
    return None


def critique_panel(crop: ImageInput, refs: References, gateway: Gateway) -> Verdict:
    """Classify a panel crop against the negative and positive references.

    An unreadable answer earns one reprompt; a second one counts as overflow.
    """
    request = ModelRequest(
        role_tag="commenter.critique",
        system_prompt=prompts.render("commenter_critique.system"),
        user_prompt=prompts.render("commenter_critique.user"),
        images=(refs.negative, refs.positive, image_bytes(crop)),
    )
    verdict = parse_verdict(gateway.complete(request).text)
    if verdict is not None:
        return verdict
    log.warning("commenter reply unreadable; asking again")
    retry = replace(request, user_prompt=prompts.render("commenter_retry.user"))
    verdict = parse_verdict(gateway.complete(retry).text)
    if verdict is not None:
        return verdict
    log.warning("commenter reply unreadable twice; treating panel as overflowing")
    return Verdict.OVERFLOW


@dataclass(frozen=True)
class CritiqueInput:
    panel_index: int
    crop: Image.Image
    block: BulletBlock
    text_region: Box
    font_scale: float
    gutter: float = 0.0


class Critic(Protocol):
    def __call__(self, inp: CritiqueInput) -> Verdict: ...


class VisionCritic:
    def __init__(self, gateway: Gateway, refs: References | None = None):
        self.gateway = gateway
        self.refs = refs or bundled_references()

    def __call__(self, inp: CritiqueInput) -> Verdict:
        return critique_panel(inp.crop, self.refs, self.gateway)


class FitCritic:
    """Uses the character-count estimate instead of a vision model."""

    def __call__(self, inp: CritiqueInput) -> Verdict:
        return estimate_fit(inp.block, inp.text_region, inp.font_scale, inp.gutter)
