"""Subword codec and word-level tokenizers.

The subword codec follows the familiar boundary-marker convention: pieces
that begin a word carry the prefix ``▁`` and decoding turns ``▁`` back into
a space.  Training is frequency-ranked pair merging with character fallback,
so any in-charset text round-trips exactly (modulo whitespace
normalization).  Word-level tokenization is rule-based for Latin scripts and
dictionary maximum-matching for CJK.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

BOUNDARY = "▁"  # ▁
UNK_PIECE = "<unk>"
EOS_PIECE = "</s>"

_CONTROL_RE = re.compile(r"^>>.+<<$")

WordList = List[str]


class SubwordVocab:
    """Immutable subword inventory with deterministic greedy encoding.

    Piece ids are dense integers starting at 0 in the order
    ``<unk>, </s>, ▁, [control tokens...], [single characters...], [merges...]``.
    Control tokens (``>>name<<``) are never produced when encoding plain text.
    """

    def __init__(self, pieces: Sequence[str], control_tokens: Iterable[str] = ()):
        pieces = list(pieces)
        if len(pieces) < 3 or pieces[0] != UNK_PIECE or pieces[1] != EOS_PIECE \
                or pieces[2] != BOUNDARY:
            raise ValueError(
                f"pieces must start with {UNK_PIECE!r}, {EOS_PIECE!r}, {BOUNDARY!r}"
            )
        if len(set(pieces)) != len(pieces):
            raise ValueError("duplicate pieces in vocab")
        self._pieces: Tuple[str, ...] = tuple(pieces)
        self._ids: Dict[str, int] = {p: i for i, p in enumerate(pieces)}
        self._controls = frozenset(control_tokens)
        for tok in self._controls:
            if tok not in self._ids:
                raise ValueError(f"control token {tok!r} not in pieces")
        # Pieces eligible for text matching: everything except <unk>, </s>
        # and control tokens.  The bare boundary marker stays matchable so
        # that any word start can be consumed.
        excluded = {UNK_PIECE, EOS_PIECE} | self._controls
        self._matchable = frozenset(p for p in pieces if p not in excluded)
        self._max_piece_len = max(len(p) for p in self._matchable)
        self.charset = frozenset(p for p in self._matchable
                                 if len(p) == 1 and p != BOUNDARY)

    # -- basic accessors -------------------------------------------------

    def __len__(self) -> int:
        return len(self._pieces)

    @property
    def pieces(self) -> Tuple[str, ...]:
        return self._pieces

    @property
    def control_tokens(self) -> frozenset:
        return self._controls

    @property
    def unk_id(self) -> int:
        return 0

    @property
    def eos_id(self) -> int:
        return 1

    def piece_to_id(self, piece: str) -> int:
        if piece not in self._ids:
            raise ValueError(f"unknown piece {piece!r}")
        return self._ids[piece]

    def id_to_piece(self, token_id: int) -> str:
        if not 0 <= token_id < len(self._pieces):
            raise ValueError(f"unknown token id {token_id}")
        return self._pieces[token_id]

    # -- codec -----------------------------------------------------------

    def encode(self, text: str, dialect_token: Optional[str] = None) -> List[int]:
        """Encode text to piece ids via greedy longest match per word.

        ``dialect_token`` must be a registered control token; when given it
        becomes element 0 of the output.  Characters outside the charset map
        to the unknown id.
        """
        ids: List[int] = []
        if dialect_token is not None:
            if dialect_token not in self._controls:
                raise ValueError(f"{dialect_token!r} is not a registered control token")
            ids.append(self._ids[dialect_token])
        for word in text.split():
            marked = BOUNDARY + word
            pos = 0
            while pos < len(marked):
                limit = min(self._max_piece_len, len(marked) - pos)
                for length in range(limit, 0, -1):
                    candidate = marked[pos:pos + length]
                    if candidate in self._matchable:
                        ids.append(self._ids[candidate])
                        pos += length
                        break
                else:
                    ids.append(self.unk_id)
                    pos += 1
        return ids

    def decode(self, tokens: Sequence[int]) -> str:
        """Decode piece ids to text; ``▁`` becomes a word separator.

        Control tokens and end-of-sequence are dropped.  Unknown ids raise.
        """
        parts: List[str] = []
        for token_id in tokens:
            piece = self.id_to_piece(int(token_id))
            if piece == EOS_PIECE or piece in self._controls:
                continue
            parts.append(piece)
        return "".join(parts).replace(BOUNDARY, " ").lstrip(" ")

    def pieces_of(self, tokens: Sequence[int]) -> List[str]:
        return [self.id_to_piece(int(t)) for t in tokens]

    # -- persistence -----------------------------------------------------

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for piece in self._pieces:
                fh.write(piece + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SubwordVocab":
        with open(path, encoding="utf-8") as fh:
            pieces = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        controls = [p for p in pieces if _CONTROL_RE.match(p)]
        return cls(pieces, control_tokens=controls)


def train_subwords(corpus: Iterable[str], vocab_size: int,
                   control_tokens: Sequence[str] = ()) -> SubwordVocab:
    """Train a subword vocab by frequency-ranked pair merging.

    Deterministic given the corpus: merge candidates are ranked by count,
    ties broken by the lexicographically smallest pair.  Merging stops when
    no adjacent pair occurs at least twice or when ``vocab_size`` is
    reached.  Every corpus character gets a single-character piece, so the
    minimum legal ``vocab_size`` is ``len(charset) + 3 specials`` plus any
    control tokens.
    """
    word_freq: Dict[str, int] = {}
    order: Dict[str, int] = {}
    for line in corpus:
        for word in line.split():
            word_freq[word] = word_freq.get(word, 0) + 1
            order.setdefault(word, len(order))
    if not word_freq:
        raise ValueError("corpus must contain at least one word")

    char_freq: Dict[str, int] = {}
    char_order: Dict[str, int] = {}
    for word, freq in word_freq.items():
        for ch in word:
            char_freq[ch] = char_freq.get(ch, 0) + freq
            char_order.setdefault(ch, order[word])
    chars = sorted(char_freq, key=lambda c: (-char_freq[c], char_order[c], c))

    minimum = len(chars) + 3 + len(control_tokens)
    if vocab_size < minimum:
        raise ValueError(
            f"vocab_size {vocab_size} too small: need at least {minimum} "
            f"({len(chars)} characters + 3 specials + {len(control_tokens)} controls)"
        )

    # Each distinct word becomes a symbol sequence starting with the marker.
    sequences: Dict[str, List[str]] = {
        word: [BOUNDARY] + list(word) for word in word_freq
    }
    pieces = [UNK_PIECE, EOS_PIECE, BOUNDARY] + list(control_tokens) + chars

    while len(pieces) < vocab_size:
        pair_counts: Dict[Tuple[str, str], int] = {}
        for word, symbols in sequences.items():
            freq = word_freq[word]
            for a, b in zip(symbols, symbols[1:]):
                pair_counts[(a, b)] = pair_counts.get((a, b), 0) + freq
        if not pair_counts:
            break
        best = min(pair_counts, key=lambda p: (-pair_counts[p], p))
        if pair_counts[best] < 2:
            break
        merged = best[0] + best[1]
        pieces.append(merged)
        for word, symbols in sequences.items():
            out: List[str] = []
            i = 0
            while i < len(symbols):
                if i + 1 < len(symbols) and (symbols[i], symbols[i + 1]) == best:
                    out.append(merged)
                    i += 2
                else:
                    out.append(symbols[i])
                    i += 1
            sequences[word] = out

    return SubwordVocab(pieces, control_tokens=control_tokens)


# -- word-level tokenization ----------------------------------------------

_OPENERS = frozenset("([{“‘«¿¡")
_CLOSERS = frozenset(")]}”’».,!?:;…")
_PEEL = _OPENERS | _CLOSERS | frozenset("\"'")


def is_cjk_lang(lang: str) -> bool:
    base = lang.replace("_", "-").split("-")[0].lower()
    return base in ("zh", "cmn", "yue", "ja", "ko")


def word_tokenize(text: str, lang: str, lexicon: Optional[Iterable[str]] = None) -> WordList:
    """Split text into words.

    Latin: whitespace split, then leading/trailing punctuation peeled into
    separate tokens.  CJK: greedy longest match against ``lexicon`` left to
    right; unmatched characters (including whitespace) come out as
    single-character words, so concatenating the output reproduces the input
    exactly.
    """
    if is_cjk_lang(lang):
        if lexicon is None:
            raise ValueError(f"word_tokenize for {lang!r} requires a lexicon")
        return _max_match(text, lexicon)

    words: WordList = []
    for token in text.split():
        leading: List[str] = []
        while token and token[0] in _PEEL:
            leading.append(token[0])
            token = token[1:]
        trailing: List[str] = []
        while token and token[-1] in _PEEL:
            trailing.append(token[-1])
            token = token[:-1]
        words.extend(leading)
        if token:
            words.append(token)
        words.extend(reversed(trailing))
    return words


def _max_match(text: str, lexicon: Iterable[str]) -> WordList:
    lex = lexicon if isinstance(lexicon, (set, frozenset)) else frozenset(lexicon)
    max_len = max((len(w) for w in lex), default=1)
    words: WordList = []
    pos = 0
    while pos < len(text):
        for length in range(min(max_len, len(text) - pos), 1, -1):
            if text[pos:pos + length] in lex:
                words.append(text[pos:pos + length])
                pos += length
                break
        else:
            words.append(text[pos])
            pos += 1
    return words


def detokenize(words: Sequence[str], lang: str) -> str:
    """Join words back into surface text.

    Latin: space-joined, with no space before closing punctuation and none
    after opening punctuation.  CJK: joined with no separator.
    """
    if is_cjk_lang(lang):
        return "".join(words)
    out = ""
    after_opener = False
    for word in words:
        if not out:
            out = word
        elif after_opener or all(ch in _CLOSERS for ch in word):
            out += word
        else:
            out += " " + word
        after_opener = bool(word) and all(ch in _OPENERS for ch in word)
    return out


def load_lexicon(path: str | Path) -> frozenset:
    """Load a CJK lexicon file: one word per line, UTF-8."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())
