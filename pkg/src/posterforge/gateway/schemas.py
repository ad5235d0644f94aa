"""Pydantic schemas for every structured model output, keyed by schema id."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, RootModel, field_validator, model_validator


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -- parser ---------------------------------------------------------------


class OutlineMeta(BaseModel):
    poster_title: str = Field(min_length=1)
    authors: str = ""
    affiliations: str = ""


class OutlineSection(BaseModel):
    title: str = Field(min_length=1)
    content: str = ""


class Outline(BaseModel):
    meta: OutlineMeta
    sections: list[OutlineSection] = Field(min_length=1)


class FilterResult(BaseModel):
    image_information: Union[dict, list]
    table_information: Union[dict, list]


# -- planner --------------------------------------------------------------


class MatchEntry(BaseModel):
    image: Optional[int] = None
    table: Optional[int] = None
    reason: str = ""

    @model_validator(mode="after")
    def _one_asset(self) -> MatchEntry:
        if self.image is None and self.table is None:
            raise ValueError("entry names neither an image nor a table")
        return self


class MatchResult(RootModel[dict[str, MatchEntry]]):
    pass


# -- painter --------------------------------------------------------------


class TextRun(_Strict):
    text: str = Field(min_length=1)
    bold: Optional[bool] = None
    italic: Optional[bool] = None

    @field_validator("text")
    @classmethod
    def _not_blank(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("run text is blank")
        return v


class BulletItem(_Strict):
    alignment: Literal["left", "center", "right"] = "left"
    bullet: bool = True
    level: int = Field(default=0, ge=0, le=3)
    font_size: int = Field(gt=0)
    runs: list[TextRun] = Field(min_length=1)

    @property
    def text(self) -> str:
        return "".join(r.text for r in self.runs)


class BulletBlock(_Strict):
    title: list[BulletItem] = Field(min_length=1)
    textbox1: list[BulletItem]
    textbox2: Optional[list[BulletItem]] = None

    @model_validator(mode="after")
    def _equal_lengths(self) -> BulletBlock:
        if self.textbox2 is not None and len(self.textbox1) != len(self.textbox2):
            raise ValueError(
                f"unequal textbox lengths: textbox1 has {len(self.textbox1)} items, "
                f"textbox2 has {len(self.textbox2)}"
            )
        return self

    @property
    def textboxes(self) -> list[list[BulletItem]]:
        boxes = [self.textbox1]
        if self.textbox2 is not None:
            boxes.append(self.textbox2)
        return boxes


# -- evaluation -----------------------------------------------------------


class JudgeOutput(BaseModel):
    reason: str = ""
    score: int = Field(ge=1, le=5)


class QuizItemRaw(BaseModel):
    aspect: str
    question: str
    options: list[str]
    answer: str


class QuizRaw(RootModel[dict[str, QuizItemRaw]]):
    pass


class AnswerEntry(BaseModel):
    answer: object = "NA"
    reference: object = "NA"


class AnswerSheet(RootModel[dict[str, AnswerEntry]]):
    pass


SCHEMAS: dict[str, type[BaseModel]] = {
    "outline": Outline,
    "filter": FilterResult,
    "matching": MatchResult,
    "painter": BulletBlock,
    "judge": JudgeOutput,
    "quiz": QuizRaw,
    "answers": AnswerSheet,
}
