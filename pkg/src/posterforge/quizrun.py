"""Quiz commands: generate the two quizzes, administer them, and score the answers."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .config import ReaderConfig, RunConfig
from .errors import ContractError
from .evaluate import PosterInput
from .gateway import Gateway
from .metrics import extract_poster_text, word_count, write_csv
from .parser import PaperDocument, convert_pdf, ingest_markdown, load_conversion
from .quiz import (
    QUIZ_KINDS,
    QuizScore,
    QuizSet,
    QuizTable,
    administer_quiz,
    aggregate_scores,
    generate_quiz,
    load_answers,
    save_answers,
)

log = logging.getLogger(__name__)

DEFAULT_READER = ReaderConfig(backend="", group="all")


@dataclass(frozen=True)
class QuizPaths:
    root: Path

    def quiz(self, kind: str) -> Path:
        return Path(self.root) / "quiz" / f"{kind}.json"

    def answers(self, reader: str, kind: str) -> Path:
        return Path(self.root) / "quiz" / "answers" / f"{reader}_{kind}.json"

    @property
    def scores(self) -> Path:
        return Path(self.root) / "reports" / "quiz_scores.json"

    @property
    def table(self) -> Path:
        return Path(self.root) / "reports" / "quiz.csv"


def _readers(config: RunConfig) -> list[ReaderConfig]:
    return list(config.quiz.readers) or [DEFAULT_READER]


def _reader_name(reader: ReaderConfig) -> str:
    return reader.backend or "default"


def paper_document(paper: Union[str, Path], workdir: Path, config: RunConfig) -> PaperDocument:
    """The converted paper, reusing a conversion already present in ``workdir``."""
    existing = Path(workdir) / "assets" / "conversion" / "conversion.json"
    if existing.is_file():
        try:
            return load_conversion(existing).document
        except (OSError, ValueError, KeyError) as exc:
            log.info("ignoring stale conversion: %s", exc)
    paper = Path(paper)
    if paper.suffix.lower() in (".md", ".markdown"):
        return ingest_markdown(paper).document
    out = Path(workdir) / "quiz" / "conversion"
    return convert_pdf(paper, out, command=config.converter.command, timeout=config.converter.timeout).document


def cmd_quiz_gen(
    paper: Union[str, Path], config: RunConfig, workdir: Path, gateway: Optional[Gateway] = None
) -> dict[str, QuizSet]:
    gateway = gateway or config.make_gateway()
    gateway.require_roles([f"quiz.generate.{k}" for k in QUIZ_KINDS])
    doc = paper_document(paper, workdir, config)
    paths = QuizPaths(workdir)
    quizzes = {}
    for kind in QUIZ_KINDS:
        quizzes[kind] = generate_quiz(doc, kind, gateway)
        quizzes[kind].save(paths.quiz(kind))
    return quizzes


def load_quizzes(workdir: Path) -> dict[str, QuizSet]:
    paths = QuizPaths(workdir)
    missing = [k for k in QUIZ_KINDS if not paths.quiz(k).is_file()]
    if missing:
        raise ContractError(f"quiz files missing for {missing}; run 'quiz gen' first")
    return {k: QuizSet.load(paths.quiz(k), k) for k in QUIZ_KINDS}


def cmd_quiz_run(
    poster: Union[str, Path], config: RunConfig, workdir: Path, gateway: Optional[Gateway] = None
) -> dict[tuple[str, str], list]:
    """Each configured reader answers both quizzes from the poster image."""
    gateway = gateway or config.make_gateway()
    readers = _readers(config)
    if any(not r.backend for r in readers):
        gateway.require_roles(["quiz.answer"])
    image = PosterInput.resolve(poster).image
    quizzes = load_quizzes(workdir)
    paths = QuizPaths(workdir)
    out = {}
    for reader in readers:
        name = _reader_name(reader)
        for kind, quiz in quizzes.items():
            answers = administer_quiz(image, quiz, gateway, reader=reader.backend or None)
            save_answers(answers, paths.answers(name, kind))
            out[(name, kind)] = answers
    return out


def score_answers(
    quizzes: dict[str, QuizSet], workdir: Path, readers: list[ReaderConfig], l: float, w: float
) -> list[QuizScore]:
    paths = QuizPaths(workdir)
    scores = []
    for reader in readers:
        name = _reader_name(reader)
        for kind, quiz in quizzes.items():
            path = paths.answers(name, kind)
            if not path.is_file():
                raise ContractError(f"no answers for reader {name} ({kind}); run 'quiz run' first")
            scores.append(QuizScore.compute(name, kind, load_answers(path), quiz, l, w, reader.group))
    return scores


def cmd_quiz_score(poster: Union[str, Path], config: RunConfig, workdir: Path) -> QuizTable:
    """Raw and density-augmented scores; the poster length is its extracted word count."""
    source = PosterInput.resolve(poster).source
    l = float(word_count(extract_poster_text(source, config.evaluation.ocr_command)))
    readers = _readers(config)
    scores = score_answers(load_quizzes(workdir), workdir, readers, l, config.quiz.w)
    groups = list(dict.fromkeys(r.group for r in readers))
    table = aggregate_scores(scores, groups)
    paths = QuizPaths(workdir)
    paths.scores.parent.mkdir(parents=True, exist_ok=True)
    paths.scores.write_text(
        json.dumps({"poster_words": l, "w": config.quiz.w, "scores": [s.to_dict() for s in scores], "table": table.row()}, indent=2)
    )
    write_csv([table.row()], paths.table, table.columns())
    return table
