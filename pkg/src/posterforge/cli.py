"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 10-16 the failing generation
stage (parsed .. assembled), 20 evaluation, 30 quiz, 40 benchmark with
failed pairs.
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from .config import RunConfig, load_config
from .errors import ConfigurationError, PosterForgeError, StageError

EXIT_CONFIG = 2
EXIT_EVALUATE = 20
EXIT_QUIZ = 30
EXIT_BENCH = 40


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _config(path: str) -> RunConfig:
    try:
        return load_config(path)
    except ConfigurationError as exc:
        _fail(str(exc), EXIT_CONFIG)


def _workdir(config: RunConfig, workdir: Optional[str]) -> Path:
    return Path(workdir or config.workdir or "run")


def _guard(code: int):
    """Map package errors raised inside a command to ``code`` (config errors to 2)."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except ConfigurationError as exc:
                _fail(str(exc), EXIT_CONFIG)
            except PosterForgeError as exc:
                _fail(str(exc), code)

        return run

    return wrap


config_option = click.option(
    "--config", "-c", "config_path", required=True, type=click.Path(exists=True, dir_okay=False), help="YAML or JSON run configuration."
)
workdir_option = click.option("--workdir", "-w", type=click.Path(file_okay=False), help="Working directory (overrides the config).")


@click.group()
@click.option("--verbose", "-v", count=True, help="Repeat for more logging.")
def cli(verbose: int) -> None:
    """Turn research papers into editable posters and score them."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.argument("paper", type=click.Path(exists=True, dir_okay=False))
@config_option
@workdir_option
@click.option("--resume/--no-resume", default=True, show_default=True, help="Reuse completed stages in the working directory.")
@click.option("--parallel/--sequential", default=None, help="Paint panels concurrently.")
def generate(paper: str, config_path: str, workdir: Optional[str], resume: bool, parallel: Optional[bool]) -> None:
    """Generate a poster from PAPER (.pdf or .md)."""
    from .pipeline import STAGE_EXIT_CODES, cmd_generate

    config = _config(config_path)
    if parallel is not None:
        config.painter.parallel = parallel
    try:
        result = cmd_generate(
            Path(paper), config, _workdir(config, workdir), resume=resume,
            on_stage=lambda s: click.echo(f"running {s}", err=True),
        )
    except ConfigurationError as exc:
        _fail(str(exc), EXIT_CONFIG)
    except StageError as exc:
        _fail(str(exc), STAGE_EXIT_CODES[exc.stage])
    click.echo(str(result.poster))
    cost = result.manifest.ledger.get("cost_usd", 0.0)
    click.echo(f"stages run: {', '.join(result.executed) or 'none'}; cost ${cost:.4f}", err=True)


@cli.command()
@click.argument("poster", type=click.Path(exists=True, dir_okay=False))
@config_option
@click.option("--gt", type=click.Path(exists=True, dir_okay=False), help="Reference poster image.")
@click.option("--reports", type=click.Path(file_okay=False), help="Output directory (default: <poster dir>/reports).")
@_guard(EXIT_EVALUATE)
def evaluate(poster: str, config_path: str, gt: Optional[str], reports: Optional[str]) -> None:
    """Compute similarity, perplexity, figure relevance and judge scores for POSTER."""
    from .evaluate import cmd_evaluate

    config = _config(config_path)
    report = cmd_evaluate(poster, gt, config, reports_dir=Path(reports) if reports else None)
    for column, value in report.row().items():
        click.echo(f"{column}: {'-' if value is None else f'{value:.4f}'}")
    for note in report.notes:
        click.echo(f"note: {note}", err=True)


@cli.group()
def quiz() -> None:
    """Generate, administer and score comprehension quizzes."""


@quiz.command("gen")
@click.argument("paper", type=click.Path(exists=True, dir_okay=False))
@config_option
@workdir_option
@_guard(EXIT_QUIZ)
def quiz_gen(paper: str, config_path: str, workdir: Optional[str]) -> None:
    """Write the verbatim and interpretive quizzes for PAPER."""
    from .quizrun import QuizPaths, cmd_quiz_gen

    config = _config(config_path)
    wd = _workdir(config, workdir)
    quizzes = cmd_quiz_gen(paper, config, wd)
    for kind in quizzes:
        click.echo(str(QuizPaths(wd).quiz(kind)))


@quiz.command("run")
@click.argument("poster", type=click.Path(exists=True, dir_okay=False))
@config_option
@workdir_option
@_guard(EXIT_QUIZ)
def quiz_run(poster: str, config_path: str, workdir: Optional[str]) -> None:
    """Have every configured reader answer both quizzes from POSTER."""
    from .quizrun import QuizPaths, cmd_quiz_run

    config = _config(config_path)
    wd = _workdir(config, workdir)
    for reader, kind in cmd_quiz_run(poster, config, wd):
        click.echo(str(QuizPaths(wd).answers(reader, kind)))


@quiz.command("score")
@click.argument("poster", type=click.Path(exists=True, dir_okay=False))
@config_option
@workdir_option
@_guard(EXIT_QUIZ)
def quiz_score(poster: str, config_path: str, workdir: Optional[str]) -> None:
    """Score saved answers; POSTER supplies the length for density augmentation."""
    from .quizrun import cmd_quiz_score

    config = _config(config_path)
    table = cmd_quiz_score(poster, config, _workdir(config, workdir))
    for column, value in table.row().items():
        click.echo(f"{column}: {'-' if value is None else f'{value:.2f}'}")


@cli.command()
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@config_option
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Directory for per-pair runs and tables.")
@click.option("--quiz/--no-quiz", "with_quiz", default=False, help="Also run the quiz for every pair.")
@click.option("--workers", type=int, help="Pairs processed concurrently (overrides the config).")
@_guard(EXIT_BENCH)
def bench(root: str, config_path: str, out_dir: str, with_quiz: bool, workers: Optional[int]) -> None:
    """Generate and evaluate every <id>/paper.pdf + <id>/poster.png pair under ROOT."""
    from .bench import cmd_bench

    config = _config(config_path)
    result = cmd_bench(Path(root), config, Path(out_dir), with_quiz=with_quiz, workers=workers)
    click.echo(str(Path(out_dir) / "bench.csv"))
    if result.failed:
        _fail(f"{len(result.failed)} pair(s) failed: {', '.join(result.failed)}", EXIT_BENCH)


def main(argv: Optional[list[str]] = None) -> None:
    cli.main(args=argv, prog_name="posterforge")


if __name__ == "__main__":
    main()
