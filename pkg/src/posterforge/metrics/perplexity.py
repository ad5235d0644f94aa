"""Perplexity of poster text under a language model."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from ..errors import MetricError


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]
    logprobs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.logprobs:
            raise MetricError("token sequence is empty")
        if len(self.tokens) != len(self.logprobs):
            raise MetricError("tokens and log-probabilities differ in length")
        for lp in self.logprobs:
            if not math.isfinite(lp) or lp > 0:
                raise MetricError(f"invalid log-probability {lp}")


class LanguageModel(Protocol):
    def score(self, text: str) -> TokenSequence: ...


def perplexity_from_logprobs(logprobs: Sequence[float]) -> float:
    if not logprobs:
        raise MetricError("no tokens")
    return math.exp(-math.fsum(logprobs) / len(logprobs))


def perplexity(text: str, lm: LanguageModel) -> float:
    if not text.strip():
        raise MetricError("no text")
    return perplexity_from_logprobs(lm.score(text).logprobs)


class UniformLM:
    """Every whitespace token has probability 1/vocab_size."""

    def __init__(self, vocab_size: int):
        if vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        self.vocab_size = vocab_size

    def score(self, text: str) -> TokenSequence:
        tokens = tuple(text.split())
        return TokenSequence(tokens, tuple(-math.log(self.vocab_size) for _ in tokens))


class FunctionLM:
    """Log-probability given by ``fn(position, token)`` over whitespace tokens."""

    def __init__(self, fn: Callable[[int, str], float]):
        self.fn = fn

    def score(self, text: str) -> TokenSequence:
        tokens = tuple(text.split())
        return TokenSequence(tokens, tuple(float(self.fn(i, t)) for i, t in enumerate(tokens)))


class HFCausalLM:
    """Causal language model from ``transformers``, loaded on first use.

    The first token has no context and is not scored, so a text of n model
    tokens yields n-1 log-probabilities.
    """

    def __init__(self, model_name: str = "gpt2", device: str = "cpu", max_length: int = 1024):
        self.model_name = model_name
        self.device = device
        self.max_length = max_length
        self._lock = threading.Lock()
        self._model = None
        self._tokenizer = None

    def _load(self):
        with self._lock:
            if self._model is None:
                try:
                    from transformers import AutoModelForCausalLM, AutoTokenizer
                except ImportError as exc:
                    raise MetricError("transformers is not installed; install the 'hf' extra") from exc
                self._tokenizer = AutoTokenizer.from_pretrained(self.model_name)
                self._model = AutoModelForCausalLM.from_pretrained(self.model_name).to(self.device).eval()
        return self._model, self._tokenizer

    def score(self, text: str) -> TokenSequence:
        import torch

        model, tok = self._load()
        ids = tok(text, return_tensors="pt").input_ids[0].to(self.device)
        tokens, logprobs = [], []
        stride = self.max_length
        for start in range(0, len(ids) - 1, stride):
            chunk = ids[start : start + stride + 1]
            with torch.no_grad():
                logits = model(chunk[:-1].unsqueeze(0)).logits[0]
            lp = torch.log_softmax(logits.float(), dim=-1)
            picked = lp.gather(1, chunk[1:].unsqueeze(1)).squeeze(1)
            logprobs.extend(min(0.0, float(v)) for v in picked)
            tokens.extend(tok.convert_ids_to_tokens(chunk[1:].tolist()))
        if not logprobs:
            raise MetricError("text is too short to score")
        return TokenSequence(tuple(tokens), tuple(logprobs))
