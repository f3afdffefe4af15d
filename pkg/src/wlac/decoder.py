"""Decoding engine: greedy, beam search, top-K sampling, and
alternatives-at-a-position with teacher-forced target prefixes.

All stochastic behavior flows through ``RngState``, a SplitMix64 generator
with fixed 64-bit arithmetic, so equal seeds reproduce equal outputs on any
platform.  Tie-breaking is lowest-token-id first everywhere, which makes
the deterministic modes exactly reproducible as well.
"""

from __future__ import annotations

import hashlib
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import DecodeConfig, Hypothesis
from .model import TranslationModel

_MASK64 = (1 << 64) - 1


class RngState:
    """Seedable SplitMix64 generator with categorical sampling."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    @classmethod
    def derive(cls, seed: Optional[int], *parts: object) -> "RngState":
        """Build an independent stream keyed by (seed, *parts).

        Hashing is content-based (SHA-256), so derived streams are stable
        across processes and platforms.
        """
        material = repr((seed, *(str(p) for p in parts))).encode("utf-8")
        digest = hashlib.sha256(material).digest()
        return cls(int.from_bytes(digest[:8], "big"))

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform_range(self, low: float, high: float) -> float:
        return low + (high - low) * self.uniform()

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def choice(self, weights: np.ndarray) -> int:
        """Draw an index proportionally to non-negative weights."""
        cumulative = np.cumsum(weights)
        total = cumulative[-1]
        if not total > 0:
            raise ValueError("weights must have positive total mass")
        index = int(np.searchsorted(cumulative, self.uniform() * total, side="right"))
        return min(index, len(weights) - 1)


def topk_candidates(dist: np.ndarray, topk: int,
                    temperature: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Restrict a distribution to its top-K tokens and reweight.

    Returns (token ids, sampling weights) in descending-probability order,
    ties broken by lowest id.  Weights are ``p ** (1/temperature)``
    renormalized; the candidate set itself never depends on temperature.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if topk < 1:
        raise ValueError("topk must be positive")
    dist = np.asarray(dist, dtype=np.float64)
    order = np.lexsort((np.arange(len(dist)), -dist))
    ids = order[:topk]
    weights = dist[ids] ** (1.0 / temperature)
    total = weights.sum()
    if not total > 0:
        raise ValueError("top-K candidates carry no probability mass")
    return ids, weights / total


def sample_step(dist: np.ndarray, topk: int, temperature: float,
                rng: RngState) -> int:
    """Sample one token from the top-K restriction of ``dist``."""
    ids, weights = topk_candidates(dist, topk, temperature)
    return int(ids[rng.choice(weights)])


def _argmax_lowest_id(dist: np.ndarray) -> int:
    # np.argmax returns the first maximum, which is the lowest id.
    return int(np.argmax(dist))


def greedy_decode(model: TranslationModel, source_tokens: Sequence[int],
                  max_len: int) -> Hypothesis:
    """Argmax decoding until end-of-sequence or ``max_len`` tokens."""
    if max_len < 1:
        raise ValueError("max_len must be positive")
    tokens: List[int] = []
    score = 0.0
    while len(tokens) < max_len:
        dist = model.next_distribution(source_tokens, tokens)
        token = _argmax_lowest_id(dist)
        score += float(np.log(dist[token]))
        if token == model.eos_id:
            break
        tokens.append(token)
    return Hypothesis(tokens=tuple(tokens), score=score)


def beam_decode(model: TranslationModel, source_tokens: Sequence[int],
                beam_size: int, num_hypotheses: int,
                max_len: int) -> List[Hypothesis]:
    """Length-unnormalized beam search returning the best finished or
    horizon-truncated hypotheses, sorted by score descending.

    Fully deterministic: score ties are broken by token-id lexicographic
    order.  With ``beam_size`` at least the number of possible sequences
    this is an exact argmax.
    """
    if beam_size < 1 or num_hypotheses < 1 or max_len < 1:
        raise ValueError("beam_size, num_hypotheses and max_len must be positive")
    eos = model.eos_id
    live: List[Tuple[float, Tuple[int, ...]]] = [(0.0, ())]
    finished: List[Tuple[float, Tuple[int, ...]]] = []
    for _ in range(max_len):
        candidates: List[Tuple[float, Tuple[int, ...]]] = []
        for score, tokens in live:
            dist = model.next_distribution(source_tokens, tokens)
            with np.errstate(divide="ignore"):
                log_probs = np.log(dist)
            order = np.lexsort((np.arange(len(dist)), -dist))
            for token in order[:beam_size]:
                token = int(token)
                extended = score + float(log_probs[token])
                if token == eos:
                    finished.append((extended, tokens))
                else:
                    candidates.append((extended, tokens + (token,)))
        candidates.sort(key=lambda item: (-item[0], item[1]))
        live = candidates[:beam_size]
        if not live:
            break
    pool = finished + live
    pool.sort(key=lambda item: (-item[0], item[1]))
    return [Hypothesis(tokens=tokens, score=score)
            for score, tokens in pool[:num_hypotheses]]


def decode_alternatives(model: TranslationModel, source_tokens: Sequence[int],
                        target_prefix_tokens: Sequence[int],
                        config: DecodeConfig, rng: RngState,
                        run_index: int = 0) -> List[Hypothesis]:
    """Teacher-force a target prefix, branch into N continuations, and
    complete each one independently.

    The prefix is fed verbatim without scoring.  At the first free position
    the deterministic mode (``sampling_topk == 0``) branches into the N most
    likely next tokens and continues each greedily; sampling mode draws N
    independent branch tokens (duplicates allowed) and continues each with
    top-K sampling.  Returned hypotheses exclude the prefix; their scores
    cover only generated tokens.  ``max_decode_len`` caps the number of
    generated tokens per hypothesis, prefix excluded.  Deterministic
    branching never expands zero-probability tokens, so fewer than N
    hypotheses come back when the distribution supports fewer.
    """
    prefix = [int(t) for t in target_prefix_tokens]
    for token in prefix:
        if not 0 <= token < model.vocab_size:
            raise ValueError(f"prefix token id {token} outside vocab")
    sampling = config.sampling_topk > 0
    n = config.num_hypotheses
    constrained = len(prefix) > 0

    branch_dist = model.next_distribution(source_tokens, prefix)
    if sampling:
        branch_tokens = [sample_step(branch_dist, config.sampling_topk,
                                     config.temperature, rng) for _ in range(n)]
    else:
        # Branch only into tokens that carry probability mass; a scripted
        # distribution may support fewer than N tokens.
        order = np.lexsort((np.arange(len(branch_dist)), -branch_dist))
        positive = [int(t) for t in order if branch_dist[t] > 0]
        branch_tokens = positive[:n]

    hypotheses: List[Hypothesis] = []
    for branch in branch_tokens:
        score = float(np.log(branch_dist[branch]))
        tokens: List[int] = []
        if branch != model.eos_id:
            tokens.append(branch)
            while len(tokens) < config.max_decode_len:
                dist = model.next_distribution(source_tokens, prefix + tokens)
                if sampling:
                    token = sample_step(dist, config.sampling_topk,
                                        config.temperature, rng)
                else:
                    token = _argmax_lowest_id(dist)
                score += float(np.log(dist[token]))
                if token == model.eos_id:
                    break
                tokens.append(token)
        hypotheses.append(Hypothesis(tokens=tuple(tokens), score=score,
                                     constrained=constrained, run_index=run_index))
    return hypotheses
