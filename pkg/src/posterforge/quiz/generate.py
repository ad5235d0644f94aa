from __future__ import annotations

from .. import prompts
from ..errors import JSONParseError, QuizGenerationError, SchemaValidationError
from ..gateway import Gateway, ModelRequest
from ..parser.library import PaperDocument
from .models import QuizKind, QuizSet, parse_quiz, quiz_violations


def _request(doc: PaperDocument, kind: QuizKind) -> ModelRequest:
    if kind == "verbatim":
        system = prompts.render("quiz_verbatim.system")
        user = prompts.render("quiz_verbatim.user", document_markdown=doc.markdown)
    elif kind == "interpretive":
        system = prompts.render("quiz_interpretive.system", document_markdown=doc.markdown)
        user = prompts.render("quiz_interpretive.user")
    else:
        raise ValueError(f"unknown quiz kind {kind!r}")
    return ModelRequest(f"quiz.generate.{kind}", system, user, expect_json=True)


def generate_quiz(doc: PaperDocument, kind: QuizKind, gateway: Gateway) -> QuizSet:
    """One examiner call; a quiz breaking any structural rule is reprompted once with the violations."""

    def check(raw) -> list[str]:
        return quiz_violations({k: v.model_dump() for k, v in raw.root.items()}, kind)

    try:
        raw = gateway.complete_json(_request(doc, kind), "quiz", check=check)
    except SchemaValidationError as exc:
        raise QuizGenerationError(f"{kind} quiz invalid after reprompt", exc.fields, exc.raw) from exc
    except JSONParseError as exc:
        raise QuizGenerationError(f"{kind} quiz unparseable after reprompt", [str(exc)], exc.raw) from exc
    return parse_quiz({k: v.model_dump() for k, v in raw.root.items()}, kind)
