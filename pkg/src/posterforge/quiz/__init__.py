"""Multiple-choice comprehension quizzes: generation, administration and scoring."""

from .administer import administer_quiz, normalize_answer
from .generate import generate_quiz
from .models import (
    ASPECTS,
    BALANCE_RANGE,
    NA,
    QUIZ_KINDS,
    QUIZ_SIZE,
    QuizItem,
    QuizSet,
    ReaderAnswer,
    load_answers,
    parse_quiz,
    question_id,
    quiz_violations,
    save_answers,
)
from .scoring import DEFAULT_W, QuizScore, QuizTable, aggregate_scores, density_augmented, score_raw

__all__ = [
    "ASPECTS",
    "BALANCE_RANGE",
    "DEFAULT_W",
    "NA",
    "QUIZ_KINDS",
    "QUIZ_SIZE",
    "QuizItem",
    "QuizScore",
    "QuizSet",
    "QuizTable",
    "ReaderAnswer",
    "administer_quiz",
    "aggregate_scores",
    "density_augmented",
    "generate_quiz",
    "load_answers",
    "normalize_answer",
    "parse_quiz",
    "question_id",
    "quiz_violations",
    "save_answers",
    "score_raw",
]
