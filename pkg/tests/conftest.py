"""Shared fixtures: hand-built vocabularies, a synthetic ambiguous parallel
corpus, and a trained toy model.

The ambiguous corpus gives every source word two plausible translations
(65/35 split) whose initials are unique across the whole target vocabulary,
so a typed prefix identifies its gold word unambiguously and accuracy
differences cleanly reflect candidate-set coverage.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

import pytest

from wlac.core import ContextCase, DecodeConfig
from wlac.decoder import RngState
from wlac.evalkit import synthesize_instances
from wlac.model import LexBigramModel, train_lexbigram
from wlac.tokenization import SubwordVocab, train_subwords

SOURCE_WORDS = ["ka", "lo", "mi", "ru", "ta", "ve", "zo", "pa", "ne", "du", "fi", "go"]

# (primary, secondary) translations; initials a..x are unique per word, so a
# typed prefix can only match its own gold word.
TRANSLATIONS: Dict[str, Tuple[str, str]] = {
    "ka": ("arbol", "banik"),
    "lo": ("cedro", "dalim"),
    "mi": ("ektor", "fulda"),
    "ru": ("gamon", "hilex"),
    "ta": ("ipsum", "jaret"),
    "ve": ("kulon", "lumet"),
    "zo": ("manor", "nexel"),
    "pa": ("orbit", "pulak"),
    "ne": ("quilo", "ramet"),
    "du": ("sinor", "tavel"),
    "fi": ("ulmos", "vigor"),
    "go": ("waxom", "xenit"),
}

PRIMARY_SHARE = 0.65


def make_parallel_pairs(n_pairs: int, seed: int) -> List[Tuple[str, str]]:
    """Every sentence is a cyclic 8-11 word run over the canonical source
    order, each word translated independently.

    The fixed word order gives the target bigram model a real sequencing
    signal (like natural word order), while the per-word 65/35 translation
    split keeps every word ambiguous.  Long sentences carry more variants
    than one branching position can expose, which is what makes continuation
    diversity (sampling) pay off over deterministic alternatives."""
    rng = RngState.derive(seed, "parallel-pairs")
    pairs = []
    for _ in range(n_pairs):
        length = 8 + rng.randint(4)
        start = rng.randint(len(SOURCE_WORDS))
        sentence = [SOURCE_WORDS[(start + j) % len(SOURCE_WORDS)]
                    for j in range(length)]
        target = []
        for word in sentence:
            primary, secondary = TRANSLATIONS[word]
            target.append(primary if rng.uniform() < PRIMARY_SHARE else secondary)
        pairs.append((" ".join(sentence), " ".join(target)))
    return pairs


def train_toy_model(pairs: List[Tuple[str, str]],
                    em_iterations: int = 10) -> Tuple[SubwordVocab, LexBigramModel]:
    lines = [s for s, _ in pairs] + [t for _, t in pairs]
    vocab = train_subwords(lines, vocab_size=400)
    encoded = [(vocab.encode(s), vocab.encode(t)) for s, t in pairs]
    model = train_lexbigram(encoded, vocab, em_iterations=em_iterations,
                            src_lang="toy", tgt_lang="en")
    return vocab, model


@pytest.fixture(scope="session")
def toy_pairs() -> List[Tuple[str, str]]:
    return make_parallel_pairs(1200, seed=7)


@pytest.fixture(scope="session")
def toy_model(toy_pairs) -> LexBigramModel:
    _, model = train_toy_model(toy_pairs)
    return model


@pytest.fixture(scope="session")
def toy_instances(toy_model):
    references = make_parallel_pairs(300, seed=11)
    rng = RngState.derive(123, "toy-instances")
    counts = {ContextCase.EMPTY: 30, ContextCase.RIGHT_ONLY: 30,
              ContextCase.LEFT_ONLY: 30, ContextCase.BOTH: 30}
    return synthesize_instances(references, counts, min_typed=1, rng=rng,
                                src_lang="toy", tgt_lang="en")


@pytest.fixture
def word_vocab() -> SubwordVocab:
    """One piece per word for token-level model tests."""
    return SubwordVocab(["<unk>", "</s>", "▁",
                         "▁a", "▁b", "▁x", "▁y"])


def eval_decode_config(**overrides) -> DecodeConfig:
    defaults = dict(beam_size=1, sampling_topk=10, num_hypotheses=10,
                    max_runs=1, max_decode_len=16)
    defaults.update(overrides)
    return DecodeConfig(**defaults)
