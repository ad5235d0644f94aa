from __future__ import annotations

import logging
import re

from .. import prompts
from ..gateway import Gateway, ModelRequest
from ..gateway.schemas import Outline
from .library import AssetLibrary, PaperDocument, PosterMeta, SectionSynopsis

log = logging.getLogger(__name__)

MAX_TITLE_WORDS = 3
_CITATION = re.compile(r"\s?\[\d+(?:\s*[,–-]\s*\d+)*\]")


def _norm(text: str) -> str:
    return " ".join(text.lower().split())


def is_title_section(section, poster_title: str) -> bool:
    """A title section names itself a title, or carries the raw paper title."""
    if "title" in section.title.lower():
        return True
    needle = _norm(poster_title)
    return bool(needle) and (needle in _norm(section.title) or needle in _norm(section.content))


def outline_problems(outline: Outline) -> list[str]:
    if not is_title_section(outline.sections[0], outline.meta.poster_title):
        return ["first section must be the poster-title section"]
    if len(outline.sections) < 2:
        return ["outline needs at least one body section after the title section"]
    return []


def truncate_title(title: str, max_words: int = MAX_TITLE_WORDS) -> str:
    words = title.split()
    if len(words) <= max_words:
        return title.strip()
    short = " ".join(words[:max_words])
    log.warning("section title %r has %d words; truncated to %r", title, len(words), short)
    return short


def strip_citations(text: str) -> str:
    return _CITATION.sub("", text)


def outline_to_library(outline: Outline) -> AssetLibrary:
    sections = [SectionSynopsis(outline.sections[0].title.strip(), outline.sections[0].content)]
    for s in outline.sections[1:]:
        sections.append(SectionSynopsis(truncate_title(s.title), strip_citations(s.content)))
    meta = PosterMeta(
        outline.meta.poster_title.strip(), outline.meta.authors.strip(), outline.meta.affiliations.strip()
    )
    return AssetLibrary(meta=meta, sections=tuple(sections))


def summarize_document(doc: PaperDocument, gateway: Gateway) -> AssetLibrary:
    """Ask the text model for a sectioned outline and turn it into an AssetLibrary.

    The title-section rule is checked inside the repair ladder, so a violating
    outline earns one reprompt before the error surfaces.
    """
    request = ModelRequest(
        role_tag="parser.summarize",
        system_prompt=prompts.render("parser_summarize.system"),
        user_prompt=prompts.render("parser_summarize.user", markdown=doc.markdown),
        expect_json=True,
    )
    outline = gateway.complete_json(request, "outline", check=outline_problems)
    return outline_to_library(outline)
