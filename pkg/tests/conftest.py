from __future__ import annotations

import shutil
import sys
from pathlib import Path

import pytest
from helpers import ScriptedModel, make_config, make_paper_pdf, scripted_gateway

from posterforge.pipeline import cmd_generate


@pytest.fixture(scope="session")
def paper_pdf(tmp_path_factory) -> Path:
    return make_paper_pdf(tmp_path_factory.mktemp("paper") / "paper.pdf")


@pytest.fixture(scope="session")
def generated_run(tmp_path_factory, paper_pdf):
    """One full mock run shared by read-only tests; copy it before mutating."""
    workdir = tmp_path_factory.mktemp("run") / "run"
    config = make_config(workdir)
    model = ScriptedModel()
    result = cmd_generate(paper_pdf, config, workdir, gateway=scripted_gateway(config, model))
    return result, model


@pytest.fixture
def run_copy(tmp_path, generated_run):
    result, _ = generated_run
    target = tmp_path / "run"
    shutil.copytree(result.workdir.root, target)
    return target


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
