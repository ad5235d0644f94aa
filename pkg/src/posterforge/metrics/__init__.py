"""Poster quality metrics: similarity, figure relevance, perplexity and rubric judging."""

from .embedding import HFClipEmbedder, MockEmbedder, make_embedder
from .judge import AESTHETIC, INFORMATION, JudgeAggregate, JudgeResult, JudgeScore, aggregate_judge, judge_poster
from .perplexity import FunctionLM, HFCausalLM, TokenSequence, UniformLM, perplexity, perplexity_from_logprobs
from .report import METRIC_COLUMNS, MetricReport, mean_row, write_csv
from .similarity import FigureTextPair, cosine, figure_relevance, visual_similarity
from .text import extract_poster_text, pptx_text, word_count, xy_cut

__all__ = [
    "AESTHETIC",
    "INFORMATION",
    "METRIC_COLUMNS",
    "FigureTextPair",
    "FunctionLM",
    "HFCausalLM",
    "HFClipEmbedder",
    "JudgeAggregate",
    "JudgeResult",
    "JudgeScore",
    "MetricReport",
    "MockEmbedder",
    "TokenSequence",
    "UniformLM",
    "aggregate_judge",
    "cosine",
    "extract_poster_text",
    "figure_relevance",
    "judge_poster",
    "make_embedder",
    "mean_row",
    "perplexity",
    "perplexity_from_logprobs",
    "pptx_text",
    "visual_similarity",
    "word_count",
    "write_csv",
    "xy_cut",
]
