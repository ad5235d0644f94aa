"""Shared fixtures: a synthetic paper PDF, scripted model replies and run configs."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Callable, Optional

import pymupdf
import yaml
from PIL import Image, ImageDraw

from posterforge.config import RunConfig, parse_config
from posterforge.gateway import Gateway, ModelRequest
from posterforge.quiz.models import ASPECTS, LETTERS, QUIZ_SIZE, question_id

PAPER_TITLE = "Sparse Routing for Efficient Document Understanding"
AUTHORS = "Ada Example, Ben Sample"
AFFILIATIONS = "Institute of Test Data"

SECTIONS = {
    "Introduction": (
        "Long documents are expensive to process. We route tokens to a small set of experts "
        "and keep accuracy while cutting compute. Prior approaches process every token densely."
    ),
    "Method": (
        "A router scores each token and sends it to the two best experts. A balancing loss keeps "
        "expert load even. The figure shows the routing block inside a transformer layer."
    ),
    "Experiments": (
        "On three benchmarks the sparse model matches the dense baseline with forty percent less "
        "compute. Ablations show the balancing loss matters most on long inputs."
    ),
    "Conclusion": (
        "Sparse routing is a simple drop-in change. Future work covers multilingual documents and "
        "learned expert counts."
    ),
}
BODY_TITLES = list(SECTIONS)
MATCHES = {"Method": {"image": 1, "reason": "routing diagram"}, "Experiments": {"image": 2, "reason": "results plot"}}


def _figure_png(path: Path, color: tuple[int, int, int], size=(480, 300)) -> Path:
    img = Image.new("RGB", size, "white")
    draw = ImageDraw.Draw(img)
    draw.rectangle([20, 20, size[0] - 20, size[1] - 20], outline=color, width=8)
    draw.ellipse([size[0] // 3, size[1] // 3, size[0] // 2, size[1] // 2 + 40], fill=color)
    img.save(path)
    return path


def make_paper_pdf(path: Path) -> Path:
    """Three pages with a title block, four sections and two captioned figures."""
    path = Path(path)
    doc = pymupdf.open()
    figs = [_figure_png(path.parent / f"_fig{k}.png", c) for k, c in ((1, (200, 40, 40)), (2, (40, 80, 200)))]

    page = doc.new_page()
    page.insert_text((72, 72), PAPER_TITLE, fontsize=18)
    page.insert_text((72, 100), AUTHORS, fontsize=11)
    page.insert_text((72, 116), AFFILIATIONS, fontsize=10)
    y = 160
    for title in BODY_TITLES[:2]:
        page.insert_text((72, y), title, fontsize=14)
        page.insert_textbox(pymupdf.Rect(72, y + 10, 540, y + 90), SECTIONS[title], fontsize=10)
        y += 110
    page.insert_image(pymupdf.Rect(150, 400, 450, 590), filename=str(figs[0]))
    page.insert_text((150, 610), "Figure 1: Routing block inside one transformer layer.", fontsize=9)

    page = doc.new_page()
    page.insert_text((72, 72), BODY_TITLES[2], fontsize=14)
    page.insert_textbox(pymupdf.Rect(72, 82, 540, 170), SECTIONS[BODY_TITLES[2]], fontsize=10)
    page.insert_image(pymupdf.Rect(150, 200, 450, 390), filename=str(figs[1]))
    page.insert_text((150, 410), "Figure 2: Accuracy against compute on three benchmarks.", fontsize=9)

    page = doc.new_page()
    page.insert_text((72, 72), BODY_TITLES[3], fontsize=14)
    page.insert_textbox(pymupdf.Rect(72, 82, 540, 170), SECTIONS[BODY_TITLES[3]], fontsize=10)
    doc.save(path)
    doc.close()
    for f in figs:
        f.unlink()
    return path


def outline_json(n_body: Optional[int] = None) -> str:
    titles = BODY_TITLES if n_body is None else [f"Part {k}" for k in range(n_body)]
    sections = [{"title": "Poster Title & Author", "content": PAPER_TITLE}]
    for t in titles:
        sections.append({"title": t, "content": SECTIONS.get(t, "Filler text for a synthetic section. " * 6)})
    meta = {"poster_title": PAPER_TITLE, "authors": AUTHORS, "affiliations": AFFILIATIONS}
    return json.dumps({"meta": meta, "sections": sections})


def bullet(text: str, size: int = 28, level: int = 0) -> dict:
    return {"alignment": "left", "bullet": True, "level": level, "font_size": size, "runs": [{"text": text}]}


def bullet_block(title: str, n_textboxes: int, n_items: int = 3, size: int = 28) -> dict:
    head = {"alignment": "left", "bullet": False, "level": 0, "font_size": size + 12, "runs": [{"text": title, "bold": True}]}
    block = {"title": [head]}
    for k in range(1, n_textboxes + 1):
        block[f"textbox{k}"] = [bullet(f"{title} point {k}.{i}: short claim", size) for i in range(1, n_items + 1)]
    return block


def valid_quiz(kind: str, seed: int = 0) -> dict:
    """A 50-item quiz satisfying every aspect and answer-balance rule."""
    aspects = ASPECTS[kind]
    raw = {}
    for k in range(1, QUIZ_SIZE + 1):
        letter = LETTERS[(k + seed) % 4]
        options = [f"{L}. option {L.lower()} for question {k}" for L in LETTERS]
        raw[question_id(k)] = {
            "aspect": aspects[(k - 1) % len(aspects)],
            "question": f"{kind} question {k} about the routing method?",
            "options": options,
            "answer": options[LETTERS.index(letter)],
        }
    return raw


def answer_sheet(quiz: dict, correct: int = QUIZ_SIZE) -> dict:
    """Answers where the first ``correct`` questions are right and the rest are wrong."""
    out = {}
    for k in range(1, QUIZ_SIZE + 1):
        qid = question_id(k)
        key = quiz[qid]["answer"][0]
        letter = key if k <= correct else LETTERS[(LETTERS.index(key) + 1) % 4]
        out[qid] = {"answer": letter, "reference": "poster text"}
    return out


_N_BOXES = re.compile(r"number_of_textboxes:\s*(\d)")


class ScriptedModel:
    """Deterministic replies per role tag, standing in for every model the pipeline calls.

    ``verdicts`` scripts the commenter (default always Good); ``judge_scores``
    maps criteria to scores; ``reader_correct`` sets how many quiz answers are right.
    """

    def __init__(
        self,
        verdicts: Optional[list[str]] = None,
        judge_scores: Optional[dict[str, int]] = None,
        reader_correct: int = QUIZ_SIZE,
        matches: Optional[dict] = None,
        n_body: Optional[int] = None,
    ):
        self.verdicts = list(verdicts or [])
        self.judge_scores = judge_scores or {}
        self.reader_correct = reader_correct
        self.matches = MATCHES if matches is None else matches
        self.n_body = n_body
        self.calls: list[str] = []
        self.quizzes = {k: valid_quiz(k, i) for i, k in enumerate(ASPECTS)}

    def __call__(self, request: ModelRequest) -> str:
        role = request.role_tag
        self.calls.append(role)
        if role == "parser.summarize":
            return outline_json(self.n_body)
        if role == "parser.filter":
            payload = json.loads(request.user_prompt[request.user_prompt.index("{"):])
            return json.dumps({"image_information": payload["image_information"], "table_information": payload["table_information"]})
        if role == "planner.match":
            return json.dumps(self.matches)
        if role == "painter.compose":
            n = int(_N_BOXES.search(request.user_prompt).group(1))
            section = json.loads(request.user_prompt[request.user_prompt.index("{"): request.user_prompt.rindex("}") + 1])
            return json.dumps(bullet_block(section["title"], n))
        if role == "commenter.critique":
            return self.verdicts.pop(0) if self.verdicts else "3"
        if role.startswith("judge."):
            criterion = role.split(".", 1)[1]
            return json.dumps({"reason": f"{criterion} looks fine", "score": self.judge_scores.get(criterion, 4)})
        if role.startswith("quiz.generate."):
            return json.dumps(self.quizzes[role.rsplit(".", 1)[1]])
        if role == "quiz.answer":
            kind = "verbatim" if "verbatim question" in request.user_prompt else "interpretive"
            return json.dumps(answer_sheet(self.quizzes[kind], self.reader_correct))
        raise AssertionError(f"unscripted role {role}")


ROUTING = {
    "parser.summarize": "mock-text",
    "parser.filter": "mock-text",
    "planner.match": "mock-text",
    "painter.compose": "mock-text",
    "commenter.critique": "mock-vision",
    "quiz.generate.verbatim": "mock-text",
    "quiz.generate.interpretive": "mock-text",
    "quiz.answer": "mock-vision",
    **{f"judge.{c}": "mock-vision" for c in (
        "element_quality", "layout_balance", "engagement", "clarity", "content_completeness", "logical_flow"
    )},
}


def config_data(workdir: Optional[Path] = None, **overrides) -> dict:
    endpoint = {"kind": "mock", "count_tokens": True}
    data = {
        "backends": [
            {"id": "mock-text", "modality": "text", "endpoint": dict(endpoint), "price_in": 5.0, "price_out": 20.0},
            {"id": "mock-vision", "modality": "vision", "endpoint": dict(endpoint), "price_in": 5.0, "price_out": 20.0},
        ],
        "routing": dict(ROUTING),
        "workdir": str(workdir) if workdir else None,
    }
    data.update(overrides)
    return data


def make_config(workdir: Optional[Path] = None, **overrides) -> RunConfig:
    return parse_config(config_data(workdir, **overrides))


def write_config(path: Path, workdir: Optional[Path] = None, **overrides) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(config_data(workdir, **overrides)))
    return path


def scripted_gateway(config: RunConfig, model: Callable[[ModelRequest], str]) -> Gateway:
    return config.make_gateway(responders={"mock-text": model, "mock-vision": model}, retry_wait=0.0)


def poster_signature(pptx_path: Path) -> list[tuple]:
    """Shape names, rounded EMU boxes and text: what two equivalent runs must share."""
    from pptx import Presentation

    prs = Presentation(str(pptx_path))
    out = []
    for shape in prs.slides[0].shapes:
        text = shape.text_frame.text if shape.has_text_frame else None
        out.append((shape.name, shape.shape_type, shape.left, shape.top, shape.width, shape.height, text))
    return out
