from __future__ import annotations

import json
import logging
import re
from typing import Optional

from .. import prompts
from ..errors import AdministrationError, BackendUnavailableError, JSONParseError, SchemaValidationError
from ..gateway import Gateway, ModelRequest
from ..imaging import ImageInput, image_bytes
from .models import NA, QuizSet, ReaderAnswer

log = logging.getLogger(__name__)

_LETTER = re.compile(r"^\s*\(?([A-D])(?:[\s.):]|$)")


def normalize_answer(value: object) -> str:
    """A-D from answers like "B", "b.", "(C)" or "D. text"; anything else is NA."""
    if not isinstance(value, str):
        return NA
    m = _LETTER.match(value.strip().upper())
    return m.group(1) if m else NA


def administer_quiz(
    poster: ImageInput, quiz: QuizSet, gateway: Gateway, reader: Optional[str] = None
) -> list[ReaderAnswer]:
    """Ask one reader to answer every question from the poster image alone.

    Always returns one answer per question; missing or unreadable entries
    become NA. A wholly unreadable reply (after the reprompt) is all NA.
    """
    request = ModelRequest(
        role_tag="quiz.answer",
        system_prompt=prompts.render("quiz_answer.system"),
        user_prompt=prompts.render(
            "quiz_answer.user", questions_json=json.dumps(quiz.questions_only(), indent=2, ensure_ascii=False)
        ),
        images=(image_bytes(poster),),
        expect_json=True,
    )
    try:
        sheet = gateway.complete_json(request, "answers", backend=reader).root
    except BackendUnavailableError as exc:
        raise AdministrationError(f"reader {reader or 'default'} failed: {exc}") from exc
    except (JSONParseError, SchemaValidationError) as exc:
        log.warning("reader %s reply unreadable; every answer set to NA (%s)", reader, exc)
        sheet = {}
    answers = []
    for item in quiz.items:
        entry = sheet.get(item.qid)
        letter = normalize_answer(entry.answer) if entry is not None else NA
        if letter == NA:
            answers.append(ReaderAnswer(item.qid, NA, NA))
            continue
        reference = entry.reference if isinstance(entry.reference, str) and entry.reference.strip() else NA
        answers.append(ReaderAnswer(item.qid, letter, reference))
    return answers
