from __future__ import annotations

import json
import shutil

import pytest
from click.testing import CliRunner
from helpers import ROUTING, ScriptedModel, write_config

from posterforge.cli import cli
from posterforge.config import RunConfig
from posterforge.pipeline import STAGE_EXIT_CODES, STAGES


@pytest.fixture
def model(monkeypatch):
    """Every gateway the CLI builds answers from one scripted model."""
    scripted = ScriptedModel()
    original = RunConfig.make_gateway

    def make_gateway(self, ledger=None, responders=None, retry_wait=0.5):
        replies = {b.id: scripted for b in self.backends}
        return original(self, ledger=ledger, responders=replies, retry_wait=0.0)

    monkeypatch.setattr(RunConfig, "make_gateway", make_gateway)
    return scripted


def invoke(*args):
    return CliRunner().invoke(cli, [str(a) for a in args], catch_exceptions=False)


def test_exit_codes_follow_stage_order():
    assert [STAGE_EXIT_CODES[s] for s in STAGES] == list(range(10, 17))


def test_generate_then_resume(tmp_path, paper_pdf, model):
    config = write_config(tmp_path / "c.yaml")
    workdir = tmp_path / "run"
    result = invoke("generate", paper_pdf, "-c", config, "-w", workdir)
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == str(workdir / "poster.pptx")
    assert (workdir / "poster.pptx").is_file()
    first = len(model.calls)

    again = invoke("generate", paper_pdf, "-c", config, "-w", workdir)
    assert again.exit_code == 0
    assert "stages run: none" in again.stderr
    assert len(model.calls) == first


def test_workdir_comes_from_config_when_not_given(tmp_path, paper_pdf, model):
    config = write_config(tmp_path / "c.yaml", workdir=tmp_path / "configured")
    assert invoke("generate", paper_pdf, "-c", config).exit_code == 0
    assert (tmp_path / "configured" / "poster.pptx").is_file()


def test_invalid_config_exits_2(tmp_path, paper_pdf):
    config = write_config(tmp_path / "c.yaml", routing={**ROUTING, "parser.summarize": "ghost"})
    result = invoke("generate", paper_pdf, "-c", config, "-w", tmp_path / "run")
    assert result.exit_code == 2
    assert "ghost" in result.stderr


def test_missing_role_exits_2(tmp_path, paper_pdf, model):
    routing = {k: v for k, v in ROUTING.items() if k != "painter.compose"}
    config = write_config(tmp_path / "c.yaml", routing=routing)
    result = invoke("generate", paper_pdf, "-c", config, "-w", tmp_path / "run")
    assert result.exit_code == 2
    assert model.calls == []


def test_conversion_failure_exits_with_parsed_code(tmp_path, paper_pdf, model):
    config = write_config(tmp_path / "c.yaml", converter={"command": ["python3", "-c", "raise SystemExit(1)"]})
    result = invoke("generate", paper_pdf, "-c", config, "-w", tmp_path / "run")
    assert result.exit_code == STAGE_EXIT_CODES["parsed"] == 10


def test_summary_failure_exits_with_summarized_code(tmp_path, paper_pdf, model, monkeypatch):
    original = ScriptedModel.__call__

    def broken(self, request):
        return "{}" if request.role_tag == "parser.summarize" else original(self, request)

    monkeypatch.setattr(ScriptedModel, "__call__", broken)
    config = write_config(tmp_path / "c.yaml")
    result = invoke("generate", paper_pdf, "-c", config, "-w", tmp_path / "run")
    assert result.exit_code == STAGE_EXIT_CODES["summarized"] == 11


def test_evaluate_writes_reports(tmp_path, generated_run, model):
    poster_dir = tmp_path / "run"
    shutil.copytree(generated_run[0].workdir.root, poster_dir)
    config = write_config(tmp_path / "c.yaml")
    result = invoke("evaluate", poster_dir / "poster.pptx", "-c", config, "--gt", poster_dir / "poster.png")
    assert result.exit_code == 0, result.output
    assert "Vis. Sim.: 1.0000" in result.stdout
    assert "Overall: 4.0000" in result.stdout
    metrics = json.loads((poster_dir / "reports" / "metrics.json").read_text())
    assert metrics["judge"]["element_quality"]["score"] == 4


def test_evaluate_failure_exits_20(tmp_path, model):
    (tmp_path / "poster.pptx").write_bytes(b"not a zip")
    config = write_config(tmp_path / "c.yaml")
    result = invoke("evaluate", tmp_path / "poster.pptx", "-c", config)
    assert result.exit_code == 20


def test_quiz_gen_run_score(tmp_path, paper_pdf, generated_run, model):
    run = tmp_path / "run"
    shutil.copytree(generated_run[0].workdir.root, run)
    config = write_config(tmp_path / "c.yaml")
    poster = run / "poster.pptx"

    gen = invoke("quiz", "gen", paper_pdf, "-c", config, "-w", run)
    assert gen.exit_code == 0, gen.output
    assert (run / "quiz" / "verbatim.json").is_file()
    assert invoke("quiz", "run", poster, "-c", config, "-w", run).exit_code == 0
    score = invoke("quiz", "score", poster, "-c", config, "-w", run)
    assert score.exit_code == 0, score.output
    assert "V-Avg: 100.00" in score.stdout
    assert "I-Avg: 100.00" in score.stdout
    assert (run / "reports" / "quiz.csv").is_file()


def test_quiz_score_without_answers_exits_30(tmp_path, paper_pdf, generated_run, model):
    run = tmp_path / "run"
    shutil.copytree(generated_run[0].workdir.root, run)
    config = write_config(tmp_path / "c.yaml")
    assert invoke("quiz", "gen", paper_pdf, "-c", config, "-w", run).exit_code == 0
    result = invoke("quiz", "score", run / "poster.pptx", "-c", config, "-w", run)
    assert result.exit_code == 30
    assert "quiz run" in result.stderr


def test_bench_over_two_pairs(tmp_path, paper_pdf, generated_run, model):
    root = tmp_path / "bench"
    for pair in ("a", "b"):
        (root / pair).mkdir(parents=True)
        shutil.copy(paper_pdf, root / pair / "paper.pdf")
    shutil.copy(generated_run[0].workdir.preview, root / "a" / "poster.png")
    config = write_config(tmp_path / "c.yaml")
    result = invoke("bench", root, "-c", config, "--out", tmp_path / "out")
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "out" / "bench.csv").read_text().splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["a", "b", "mean"]


def test_bench_with_failing_pair_exits_40(tmp_path, paper_pdf, model):
    root = tmp_path / "bench"
    (root / "good").mkdir(parents=True)
    shutil.copy(paper_pdf, root / "good" / "paper.pdf")
    (root / "bad").mkdir()
    (root / "bad" / "paper.md").write_text("   ")
    config = write_config(tmp_path / "c.yaml")
    result = invoke("bench", root, "-c", config, "--out", tmp_path / "out")
    assert result.exit_code == 40
    assert "bad" in result.stderr


def test_bench_on_empty_directory_exits_40(tmp_path, model):
    (tmp_path / "empty").mkdir()
    config = write_config(tmp_path / "c.yaml")
    result = invoke("bench", tmp_path / "empty", "-c", config, "--out", tmp_path / "out")
    assert result.exit_code == 40
    assert "no pairs" in result.stderr
