"""Autoregressive translation models over a subword vocabulary.

``TranslationModel`` is the abstract surface the decoder sees: a pure
function from (source tokens, target prefix tokens) to a next-token
probability vector over the target vocabulary, end-of-sequence included.

Two implementations are provided.  ``ScriptedModel`` returns explicitly
scripted distributions and exists for deterministic decoder tests.
``LexBigramModel`` is a desk-scale statistical model: a lexical table
trained with IBM Model 1 EM, mixed with an add-alpha smoothed target bigram
language model.  Its next-token distribution is

    p(e) ∝ bigram(e | prev) * (eps + mean_j t(e | x_j))

where the mean runs over the source tokens plus a NULL token, and the
end-of-sequence entry uses ``eps + 1/(n+1)`` as its lexical factor.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .tokenization import SubwordVocab

NULL_TOKEN = "<null>"  # lexical-table row for the empty source alignment
BOS_TOKEN = "<s>"      # bigram context for the first target token

TokenPair = Tuple[Sequence[int], Sequence[int]]


class TranslationModel(ABC):
    """Next-token-distribution provider over a fixed target vocabulary."""

    @property
    @abstractmethod
    def vocab_size(self) -> int:
        ...

    @property
    @abstractmethod
    def eos_id(self) -> int:
        ...

    @abstractmethod
    def next_distribution(self, source_tokens: Sequence[int],
                          target_prefix_tokens: Sequence[int]) -> np.ndarray:
        """Return a fresh probability vector of length ``vocab_size``.

        Must be pure: identical inputs yield identical vectors, summing to 1
        within 1e-9.
        """

    # Text codecs; models used only for token-level decoding may not have one.
    @property
    def vocab(self) -> SubwordVocab:
        raise NotImplementedError("this model has no text vocabulary attached")

    def encode_source(self, text: str) -> List[int]:
        return self.vocab.encode(text)

    def encode_target(self, text: str) -> List[int]:
        return self.vocab.encode(text)


class ScriptedModel(TranslationModel):
    """Model driven by an explicit prefix -> distribution table.

    The source sentence is ignored; unlisted prefixes fall back to the
    default distribution.  Every distribution must sum to 1 within 1e-9.
    """

    def __init__(self, table: Dict[Tuple[int, ...], Sequence[float]],
                 default: Sequence[float], eos_id: int = 0,
                 text_vocab: Optional[SubwordVocab] = None):
        self._default = self._validated(default)
        self._table = {tuple(k): self._validated(v) for k, v in table.items()}
        for dist in self._table.values():
            if len(dist) != len(self._default):
                raise ValueError("all scripted distributions must share one length")
        if not 0 <= eos_id < len(self._default):
            raise ValueError("eos_id out of range")
        self._eos_id = eos_id
        self._text_vocab = text_vocab

    @staticmethod
    def _validated(dist: Sequence[float]) -> np.ndarray:
        arr = np.asarray(dist, dtype=np.float64)
        if arr.ndim != 1 or np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError(f"invalid probability vector: {dist}")
        return arr

    @property
    def vocab_size(self) -> int:
        return len(self._default)

    @property
    def eos_id(self) -> int:
        return self._eos_id

    @property
    def vocab(self) -> SubwordVocab:
        if self._text_vocab is None:
            raise NotImplementedError("ScriptedModel built without a text vocab")
        return self._text_vocab

    def next_distribution(self, source_tokens: Sequence[int],
                          target_prefix_tokens: Sequence[int]) -> np.ndarray:
        dist = self._table.get(tuple(int(t) for t in target_prefix_tokens), self._default)
        return dist.copy()


class LexBigramModel(TranslationModel):
    """Lexical + bigram statistical model behind the decoder interface."""

    def __init__(self, joint_vocab: SubwordVocab,
                 lexical: Dict[int, Dict[int, float]],
                 null_row: Dict[int, float],
                 bigram_counts: Dict[int, Dict[int, int]],
                 alpha: float, mix_epsilon: float, em_iterations: int,
                 src_lang: str = "xx", tgt_lang: str = "xx",
                 dialect_token: Optional[str] = None,
                 likelihood_history: Sequence[float] = ()):
        self._vocab = joint_vocab
        self._size = len(joint_vocab)
        self.alpha = float(alpha)
        self.mix_epsilon = float(mix_epsilon)
        self.em_iterations = int(em_iterations)
        self.src_lang = src_lang
        self.tgt_lang = tgt_lang
        self.dialect_token = dialect_token
        self.likelihood_history = tuple(float(x) for x in likelihood_history)

        self._lexical = {f: dict(row) for f, row in lexical.items()}
        self._null_row = dict(null_row)
        self._bigram_counts = {u: dict(row) for u, row in bigram_counts.items()}

        # Dense caches, built lazily; the model itself stays logically
        # immutable so concurrent readers are safe under the GIL.
        self._lex_rows: Dict[int, np.ndarray] = {}
        self._bigram_rows: Dict[int, np.ndarray] = {}
        self._lex_factor_cache: Dict[Tuple[int, ...], np.ndarray] = {}
        self._null_dense = self._dense(self._null_row)

        self._check_normalized()

    # -- invariant checks -------------------------------------------------

    def _check_normalized(self) -> None:
        for f, row in self._lexical.items():
            total = sum(row.values())
            if abs(total - 1.0) > 1e-6:
                raise ValueError(f"lexical row for token {f} sums to {total}")
        null_total = sum(self._null_row.values())
        if self._null_row and abs(null_total - 1.0) > 1e-6:
            raise ValueError(f"lexical NULL row sums to {null_total}")

    def _dense(self, row: Dict[int, float]) -> np.ndarray:
        vec = np.zeros(self._size, dtype=np.float64)
        for e, p in row.items():
            vec[e] = p
        return vec

    # -- TranslationModel surface ------------------------------------------

    @property
    def vocab(self) -> SubwordVocab:
        return self._vocab

    @property
    def vocab_size(self) -> int:
        return self._size

    @property
    def eos_id(self) -> int:
        return self._vocab.eos_id

    def encode_source(self, text: str) -> List[int]:
        return self._vocab.encode(text, dialect_token=self.dialect_token)

    def encode_target(self, text: str) -> List[int]:
        return self._vocab.encode(text)

    def _lex_row(self, f: int) -> np.ndarray:
        row = self._lex_rows.get(f)
        if row is None:
            row = self._dense(self._lexical.get(f, {}))
            self._lex_rows[f] = row
        return row

    def _bigram_row(self, context: int) -> np.ndarray:
        """Add-alpha smoothed next-token probabilities for one context."""
        row = self._bigram_rows.get(context)
        if row is None:
            counts = self._bigram_counts.get(context, {})
            total = sum(counts.values())
            row = np.full(self._size, self.alpha, dtype=np.float64)
            for v, c in counts.items():
                row[v] += c
            row /= total + self.alpha * self._size
            self._bigram_rows[context] = row
        return row

    def _lex_factor(self, source_key: Tuple[int, ...]) -> np.ndarray:
        factor = self._lex_factor_cache.get(source_key)
        if factor is None:
            total = self._null_dense.copy()
            for f in source_key:
                total += self._lex_row(f)
            mean = total / (len(source_key) + 1)
            factor = self.mix_epsilon + mean
            factor[self.eos_id] = self.mix_epsilon + 1.0 / (len(source_key) + 1)
            if len(self._lex_factor_cache) > 64:
                self._lex_factor_cache.clear()
            self._lex_factor_cache[source_key] = factor
        return factor

    def next_distribution(self, source_tokens: Sequence[int],
                          target_prefix_tokens: Sequence[int]) -> np.ndarray:
        source_key = tuple(int(t) for t in source_tokens)
        for t in source_key:
            if not 0 <= t < self._size:
                raise ValueError(f"unknown source token id {t}")
        context = -1  # BOS
        if len(target_prefix_tokens) > 0:
            context = int(target_prefix_tokens[-1])
            if not 0 <= context < self._size:
                raise ValueError(f"unknown target token id {context}")
        dist = self._bigram_row(context) * self._lex_factor(source_key)
        return dist / dist.sum()

    # -- persistence --------------------------------------------------------

    def save(self, model_dir: str | Path) -> None:
        """Write the model directory: vocab, lexical and bigram tables, metadata."""
        model_dir = Path(model_dir)
        model_dir.mkdir(parents=True, exist_ok=True)
        self._vocab.save(model_dir / "vocab.txt")
        piece = self._vocab.id_to_piece
        with open(model_dir / "lexical.tsv", "w", encoding="utf-8") as fh:
            for e, p in sorted(self._null_row.items()):
                fh.write(f"{NULL_TOKEN}\t{piece(e)}\t{p!r}\n")
            for f in sorted(self._lexical):
                for e, p in sorted(self._lexical[f].items()):
                    fh.write(f"{piece(f)}\t{piece(e)}\t{p!r}\n")
        with open(model_dir / "bigram.tsv", "w", encoding="utf-8") as fh:
            for u in sorted(self._bigram_counts):
                name = BOS_TOKEN if u == -1 else piece(u)
                for v, c in sorted(self._bigram_counts[u].items()):
                    fh.write(f"{name}\t{piece(v)}\t{c}\n")
        meta = {
            "alpha": self.alpha,
            "mix_epsilon": self.mix_epsilon,
            "em_iterations": self.em_iterations,
            "src_lang": self.src_lang,
            "tgt_lang": self.tgt_lang,
            "dialect_token": self.dialect_token,
            "likelihood_history": list(self.likelihood_history),
        }
        with open(model_dir / "meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, ensure_ascii=False, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, model_dir: str | Path) -> "LexBigramModel":
        model_dir = Path(model_dir)
        vocab = SubwordVocab.load(model_dir / "vocab.txt")
        lexical: Dict[int, Dict[int, float]] = {}
        null_row: Dict[int, float] = {}
        with open(model_dir / "lexical.tsv", encoding="utf-8") as fh:
            for line in fh:
                f_piece, e_piece, prob = line.rstrip("\n").split("\t")
                e = vocab.piece_to_id(e_piece)
                if f_piece == NULL_TOKEN:
                    null_row[e] = float(prob)
                else:
                    lexical.setdefault(vocab.piece_to_id(f_piece), {})[e] = float(prob)
        bigram_counts: Dict[int, Dict[int, int]] = {}
        with open(model_dir / "bigram.tsv", encoding="utf-8") as fh:
            for line in fh:
                u_piece, v_piece, count = line.rstrip("\n").split("\t")
                u = -1 if u_piece == BOS_TOKEN else vocab.piece_to_id(u_piece)
                bigram_counts.setdefault(u, {})[vocab.piece_to_id(v_piece)] = int(count)
        with open(model_dir / "meta.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        return cls(vocab, lexical, null_row, bigram_counts,
                   alpha=meta["alpha"], mix_epsilon=meta["mix_epsilon"],
                   em_iterations=meta["em_iterations"],
                   src_lang=meta["src_lang"], tgt_lang=meta["tgt_lang"],
                   dialect_token=meta.get("dialect_token"),
                   likelihood_history=meta.get("likelihood_history", ()))


# -- training ----------------------------------------------------------------


def _em_iterate(pairs: List[Tuple[Tuple[int, ...], Tuple[int, ...]]],
                em_iterations: int
                ) -> Tuple[Dict[int, Dict[int, float]], Dict[int, float], List[float]]:
    """IBM Model 1 EM with a NULL source token and uniform initialization.

    Returns the lexical table keyed by source token id (-1 for NULL) split
    into real rows and the NULL row, plus the corpus log-likelihood of the
    table in effect at the start of each iteration.
    """
    support: Dict[int, set] = {}
    for src, tgt in pairs:
        for f in set(src) | {-1}:
            support.setdefault(f, set()).update(tgt)

    t: Dict[int, Dict[int, float]] = {
        f: {e: 1.0 / len(es) for e in sorted(es)} for f, es in support.items()
    }

    history: List[float] = []
    for _ in range(em_iterations):
        counts: Dict[int, Dict[int, float]] = {f: {} for f in t}
        totals: Dict[int, float] = {f: 0.0 for f in t}
        log_lik = 0.0
        for src, tgt in pairs:
            candidates = list(src) + [-1]
            for e in tgt:
                denom = sum(t[f].get(e, 0.0) for f in candidates)
                log_lik += math.log(denom / len(candidates))
                for f in candidates:
                    frac = t[f].get(e, 0.0) / denom
                    if frac:
                        counts[f][e] = counts[f].get(e, 0.0) + frac
                        totals[f] += frac
        history.append(log_lik)
        for f, row in counts.items():
            if totals[f] > 0:
                t[f] = {e: c / totals[f] for e, c in sorted(row.items())}

    null_row = t.pop(-1, {})
    return t, null_row, history


def train_lexbigram(corpus: Sequence[TokenPair], vocab: SubwordVocab,
                    em_iterations: int = 5, alpha: float = 0.1,
                    mix_epsilon: float = 1e-4,
                    src_lang: str = "xx", tgt_lang: str = "xx",
                    dialect_token: Optional[str] = None) -> LexBigramModel:
    """Train the lexical table and bigram LM from a pre-encoded corpus.

    ``corpus`` holds (source tokens, target tokens) pairs already encoded
    with ``vocab``.  Deterministic given the inputs.
    """
    if em_iterations < 0:
        raise ValueError("em_iterations must be non-negative")
    pairs = [(tuple(int(t) for t in src), tuple(int(t) for t in tgt))
             for src, tgt in corpus]
    pairs = [(src, tgt) for src, tgt in pairs if src and tgt]
    if not pairs:
        raise ValueError("training corpus must contain at least one non-empty pair")
    size = len(vocab)
    for src, tgt in pairs:
        for token in (*src, *tgt):
            if not 0 <= token < size:
                raise ValueError(f"token id {token} outside vocab of size {size}")

    lexical, null_row, history = _em_iterate(pairs, em_iterations)

    bigram_counts: Dict[int, Dict[int, int]] = {}
    eos = vocab.eos_id
    for _, tgt in pairs:
        context = -1
        for token in (*tgt, eos):
            row = bigram_counts.setdefault(context, {})
            row[token] = row.get(token, 0) + 1
            context = token

    return LexBigramModel(vocab, lexical, null_row, bigram_counts,
                          alpha=alpha, mix_epsilon=mix_epsilon,
                          em_iterations=em_iterations,
                          src_lang=src_lang, tgt_lang=tgt_lang,
                          dialect_token=dialect_token,
                          likelihood_history=history)


def corpus_log_likelihood(model: LexBigramModel, corpus: Sequence[TokenPair]) -> float:
    """IBM Model 1 corpus log-likelihood under the model's lexical table.

    Each target token contributes log of the mean of t(e|f) over the source
    tokens plus NULL.  An empty corpus scores 0.
    """
    total = 0.0
    for src, tgt in corpus:
        src = [int(t) for t in src]
        denom = len(src) + 1
        for e in tgt:
            e = int(e)
            mass = model._null_row.get(e, 0.0)
            for f in src:
                mass += model._lexical.get(f, {}).get(e, 0.0)
            total += math.log(mass / denom) if mass > 0 else float("-inf")
    return total


def lexical_prob(model: LexBigramModel, source_piece: str, target_piece: str) -> float:
    """Convenience lookup of t(target | source) by piece string."""
    vocab = model.vocab
    if source_piece == NULL_TOKEN:
        return model._null_row.get(vocab.piece_to_id(target_piece), 0.0)
    f = vocab.piece_to_id(source_piece)
    return model._lexical.get(f, {}).get(vocab.piece_to_id(target_piece), 0.0)
