"""Quiz sets, the structural validator, and reader answers."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Mapping

from ..errors import QuizValidationError

QuizKind = Literal["verbatim", "interpretive"]
QUIZ_KINDS: tuple[QuizKind, ...] = ("verbatim", "interpretive")
QUIZ_SIZE = 50
LETTERS = "ABCD"
NA = "NA"
ASPECTS: dict[str, str] = {"verbatim": "ABCDEFGHIJKLM", "interpretive": "ABCDEFGHIJ"}
VERBATIM_ASPECT_MAX = 5
INTERPRETIVE_ASPECT_MIN = 2
BALANCE_RANGE = (8, 18)

_ANSWER = re.compile(r"^([A-D])\.\s(.+)$", re.DOTALL)


def question_id(k: int) -> str:
    return f"Question {k}"


@dataclass(frozen=True)
class QuizItem:
    qid: str
    aspect: str
    question: str
    options: tuple[str, str, str, str]
    answer_letter: str
    answer_text: str

    def to_dict(self) -> dict:
        return {
            "aspect": self.aspect,
            "question": self.question,
            "options": list(self.options),
            "answer": f"{self.answer_letter}. {self.answer_text}",
        }


@dataclass(frozen=True)
class QuizSet:
    kind: QuizKind
    items: tuple[QuizItem, ...]

    def to_json(self) -> dict[str, dict]:
        return {it.qid: it.to_dict() for it in self.items}

    def questions_only(self) -> dict[str, dict]:
        return {it.qid: {"question": it.question, "options": list(it.options)} for it in self.items}

    def key(self) -> dict[str, str]:
        return {it.qid: it.answer_letter for it in self.items}

    def save(self, path: Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps(self.to_json(), indent=2, ensure_ascii=False))

    @classmethod
    def load(cls, path: Path, kind: QuizKind) -> QuizSet:
        return parse_quiz(json.loads(Path(path).read_text()), kind)


def _item_violations(qid: str, entry: Any, kind: str) -> list[str]:
    if not isinstance(entry, Mapping):
        return [f"{qid}: item is not an object"]
    out = []
    for name in ("aspect", "question", "options", "answer"):
        if name not in entry:
            out.append(f"{qid}: missing field '{name}'")
    if out:
        return out
    aspect, question, options, answer = entry["aspect"], entry["question"], entry["options"], entry["answer"]
    if not isinstance(aspect, str) or aspect not in ASPECTS[kind]:
        out.append(f"{qid}: aspect {aspect!r} not in {ASPECTS[kind][0]}-{ASPECTS[kind][-1]}")
    if not isinstance(question, str) or not question.strip():
        out.append(f"{qid}: empty question")
    if not isinstance(options, list) or len(options) != 4:
        out.append(f"{qid}: needs exactly 4 options")
        return out
    for letter, option in zip(LETTERS, options):
        if not isinstance(option, str) or not option.startswith(f"{letter}. ") or not option[3:].strip():
            out.append(f"{qid}: option {letter} must look like '{letter}. <text>'")
    m = _ANSWER.match(answer) if isinstance(answer, str) else None
    if m is None:
        out.append(f"{qid}: answer must look like '<Letter>. <option text>'")
    else:
        option = options[LETTERS.index(m.group(1))]
        if isinstance(option, str) and m.group(2).strip() != option[3:].strip():
            out.append(f"{qid}: answer text does not match option {m.group(1)}")
    return out


def quiz_violations(raw: Any, kind: QuizKind) -> list[str]:
    """Every structural rule a generated quiz breaks; empty when it is valid."""
    if kind not in ASPECTS:
        raise ValueError(f"unknown quiz kind {kind!r}")
    if not isinstance(raw, Mapping):
        return ["quiz is not a JSON object"]
    out = []
    if len(raw) != QUIZ_SIZE:
        out.append(f"count ≠ {QUIZ_SIZE}: got {len(raw)} items")
    expected = {question_id(k) for k in range(1, QUIZ_SIZE + 1)}
    wrong_keys = sorted(set(raw) - expected)
    if wrong_keys:
        out.append(f"unexpected keys {wrong_keys[:5]}")
    aspects: Counter = Counter()
    letters: Counter = Counter()
    for qid, entry in raw.items():
        problems = _item_violations(qid, entry, kind)
        out.extend(problems)
        if isinstance(entry, Mapping):
            if isinstance(entry.get("aspect"), str):
                aspects[entry["aspect"]] += 1
            m = _ANSWER.match(entry.get("answer", "")) if isinstance(entry.get("answer"), str) else None
            if m:
                letters[m.group(1)] += 1
    if kind == "verbatim":
        for a in ASPECTS[kind]:
            if aspects[a] < 1:
                out.append(f"aspect {a} missing")
            elif aspects[a] > VERBATIM_ASPECT_MAX:
                out.append(f"aspect {a} used {aspects[a]} times (max {VERBATIM_ASPECT_MAX})")
    else:
        for a in ASPECTS[kind]:
            if aspects[a] < INTERPRETIVE_ASPECT_MIN:
                out.append(f"aspect {a} used {aspects[a]} times (min {INTERPRETIVE_ASPECT_MIN})")
    lo, hi = BALANCE_RANGE
    for letter in LETTERS:
        if not lo <= letters[letter] <= hi:
            out.append(f"answer balance: {letter} is correct {letters[letter]} times (allowed {lo}-{hi})")
    return out


def parse_quiz(raw: Any, kind: QuizKind) -> QuizSet:
    problems = quiz_violations(raw, kind)
    if problems:
        raise QuizValidationError(problems)
    items = []
    for k in range(1, QUIZ_SIZE + 1):
        qid = question_id(k)
        entry = raw[qid]
        m = _ANSWER.match(entry["answer"])
        items.append(
            QuizItem(qid, entry["aspect"], entry["question"], tuple(entry["options"]), m.group(1), m.group(2).strip())
        )
    return QuizSet(kind, tuple(items))


@dataclass(frozen=True)
class ReaderAnswer:
    question_id: str
    answer: str  # A-D or NA
    reference: str = NA

    def __post_init__(self) -> None:
        if self.answer not in (*LETTERS, NA):
            raise ValueError(f"answer must be one of A-D or NA, got {self.answer!r}")


def save_answers(answers: list[ReaderAnswer], path: Path) -> None:
    data = {a.question_id: {"answer": a.answer, "reference": a.reference} for a in answers}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(data, indent=2, ensure_ascii=False))


def load_answers(path: Path) -> list[ReaderAnswer]:
    data = json.loads(Path(path).read_text())
    return [ReaderAnswer(qid, v["answer"], v.get("reference", NA)) for qid, v in data.items()]
