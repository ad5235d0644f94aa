from __future__ import annotations

import shutil

import numpy as np
import pytest
from helpers import ScriptedModel, make_config, scripted_gateway
from PIL import Image

from posterforge.errors import CapabilityError, ConfigurationError
from posterforge.evaluate import PosterInput, cmd_evaluate, workdir_figure_pairs
from posterforge.metrics import METRIC_COLUMNS, MetricReport, MockEmbedder, UniformLM


def test_image_poster_is_its_own_source(tmp_path):
    Image.new("RGB", (4, 4)).save(tmp_path / "p.png")
    poster = PosterInput.resolve(tmp_path / "p.png")
    assert poster.source == poster.image == tmp_path / "p.png"


def test_pptx_poster_needs_a_rendered_image(tmp_path):
    (tmp_path / "x.pptx").write_bytes(b"")
    with pytest.raises(CapabilityError, match="no rendered image"):
        PosterInput.resolve(tmp_path / "x.pptx")
    Image.new("RGB", (4, 4)).save(tmp_path / "poster.png")
    assert PosterInput.resolve(tmp_path / "x.pptx").image == tmp_path / "poster.png"


def test_unsupported_or_missing_poster(tmp_path):
    (tmp_path / "p.pdf").write_bytes(b"%PDF")
    with pytest.raises(CapabilityError, match="unsupported"):
        PosterInput.resolve(tmp_path / "p.pdf")
    with pytest.raises(CapabilityError, match="not found"):
        PosterInput.resolve(tmp_path / "none.png")


def test_figure_pairs_come_from_the_generated_workdir(generated_run, tmp_path):
    result, _ = generated_run
    pairs = workdir_figure_pairs(result.workdir.root)
    matched = sorted(result.plan.matches)
    assert len(pairs) == len(matched) == 2
    for pair, index in zip(pairs, matched):
        assert pair.section_text == result.library.body_sections[index].content
    assert workdir_figure_pairs(tmp_path) is None


def evaluate(poster, gt=None, **kwargs):
    config = make_config()
    gateway = scripted_gateway(config, ScriptedModel(**kwargs))
    return cmd_evaluate(poster, gt, config, gateway=gateway, embedder=MockEmbedder(), lm=UniformLM(4))


def test_generated_poster_metrics(generated_run, tmp_path):
    run = tmp_path / "run"
    shutil.copytree(generated_run[0].workdir.root, run)
    report = evaluate(run / "poster.pptx", run / "poster.png", judge_scores={"engagement": 2})
    assert report.visual_similarity == pytest.approx(1.0)
    assert report.ppl == pytest.approx(4.0)
    assert -1.0 <= report.figure_relevance <= 1.0
    assert report.complete
    assert report.aesthetic_avg == pytest.approx(10 / 3)
    assert report.information_avg == 4.0
    assert MetricReport.load(run / "reports" / "metrics.json") == report
    header = (run / "reports" / "metrics.csv").read_text().splitlines()[0]
    assert header.split(",") == METRIC_COLUMNS


def test_without_reference_similarity_is_blank(generated_run, tmp_path):
    run = tmp_path / "run"
    shutil.copytree(generated_run[0].workdir.root, run)
    report = evaluate(run / "poster.pptx")
    assert report.visual_similarity is None
    assert any("ground-truth" in n for n in report.notes)
    assert report.row()["Vis. Sim."] is None


def test_foreign_image_poster_omits_text_and_figure_metrics(tmp_path):
    rng = np.random.default_rng(0)
    Image.fromarray(rng.integers(0, 255, (40, 60, 3), dtype=np.uint8)).save(tmp_path / "poster.png")
    report = evaluate(tmp_path / "poster.png")
    assert report.ppl is None and report.figure_relevance is None
    assert any("perplexity omitted" in n for n in report.notes)
    assert report.overall == 4.0


def test_judge_roles_are_required(tmp_path):
    Image.new("RGB", (4, 4)).save(tmp_path / "poster.png")
    routing = {k: v for k, v in make_config().routing.items() if k != "judge.clarity"}
    config = make_config(routing=routing)
    with pytest.raises(ConfigurationError, match="judge.clarity"):
        cmd_evaluate(tmp_path / "poster.png", None, config, gateway=scripted_gateway(config, ScriptedModel()))
