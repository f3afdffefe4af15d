"""Domain types shared by every module, plus context-case classification.

A completion problem is a tuple of source sentence, partial target context
(left and/or right), and the characters the user has typed for the unknown
word.  The dataset interchange format is UTF-8 JSON Lines with one instance
per line and a fixed canonical key order, so that parse -> serialize is a
byte-identical round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional, Tuple


class ContextCase(Enum):
    """Which sides of the partial translation are present."""

    EMPTY = "empty"
    RIGHT_ONLY = "right_only"
    LEFT_ONLY = "left_only"
    BOTH = "both"


def is_han_lang(lang: str) -> bool:
    """True for language codes whose match keys are Pinyin romanizations."""
    base = lang.replace("_", "-").split("-")[0].lower()
    return base in ("zh", "cmn", "yue")


@dataclass(frozen=True)
class WlacInstance:
    """One completion problem.

    ``typed`` is the character sequence the user has entered for the unknown
    word (Pinyin characters for Chinese targets).  ``gold`` is present only
    in evaluation data.  The unknown word sits between ``left_context`` and
    ``right_context`` but is not necessarily adjacent to either.
    """

    id: str
    source: str
    left_context: str
    right_context: str
    typed: str
    gold: Optional[str] = None
    src_lang: str = "xx"
    tgt_lang: str = "en"

    def __post_init__(self) -> None:
        if not self.typed:
            raise ValueError("typed sequence must be non-empty")
        if any(ch.isspace() for ch in self.typed):
            raise ValueError("typed sequence must not contain whitespace")
        if self.gold is not None:
            if not self.gold or any(ch.isspace() for ch in self.gold):
                raise ValueError("gold must be a single word")
            # Latin match keys are the word itself; Han keys need a Pinyin
            # table and are validated where one is available.
            if not is_han_lang(self.tgt_lang) and not self.gold.startswith(self.typed):
                raise ValueError(
                    f"gold {self.gold!r} does not start with typed {self.typed!r}"
                )


@dataclass(frozen=True)
class DecodeConfig:
    """All decoding knobs.

    ``sampling_topk == 0`` disables sampling entirely: decoding is then
    deterministic given the model and independent of any RNG.  When
    ``temperature_max`` is set, each run draws its temperature uniformly
    from ``[temperature, temperature_max]``.
    """

    beam_size: int = 1
    sampling_topk: int = 0
    num_hypotheses: int = 1
    temperature: float = 1.0
    temperature_max: Optional[float] = None
    max_runs: int = 5
    max_decode_len: int = 64
    seed: Optional[int] = None
    detok: bool = True

    def __post_init__(self) -> None:
        if self.beam_size < 1:
            raise ValueError("beam_size must be positive")
        if self.sampling_topk < 0:
            raise ValueError("sampling_topk must be non-negative")
        if self.num_hypotheses < 1:
            raise ValueError("num_hypotheses must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.temperature_max is not None and self.temperature_max < self.temperature:
            raise ValueError("temperature_max must be >= temperature")
        if self.max_runs < 1:
            raise ValueError("max_runs must be positive")
        if self.max_decode_len < 1:
            raise ValueError("max_decode_len must be positive")

    def with_temperature(self, temperature: float) -> "DecodeConfig":
        return replace(self, temperature=temperature, temperature_max=None)


@dataclass(frozen=True)
class Hypothesis:
    """One generated target token sequence.

    ``tokens`` excludes any forced prefix and the terminating end-of-sequence
    token; ``score`` is the sum of log-probabilities of the generated tokens
    (including the end-of-sequence step when one was generated).
    """

    tokens: Tuple[int, ...]
    score: float
    constrained: bool = False
    run_index: int = 0

    def __post_init__(self) -> None:
        if self.score > 1e-12:
            raise ValueError(f"hypothesis score must be <= 0, got {self.score}")
        if self.run_index < 0:
            raise ValueError("run_index must be non-negative")


@dataclass(frozen=True)
class Prediction:
    """A matched word together with the hypothesis it came from."""

    word: str
    source_hypothesis: Hypothesis
    runs_used: int

    def __post_init__(self) -> None:
        if self.runs_used < 1:
            raise ValueError("runs_used must be positive")


def classify_context(instance: WlacInstance) -> ContextCase:
    """Classify an instance by which contexts are (non-)empty after trimming."""
    has_left = bool(instance.left_context.strip())
    has_right = bool(instance.right_context.strip())
    if has_left and has_right:
        return ContextCase.BOTH
    if has_left:
        return ContextCase.LEFT_ONLY
    if has_right:
        return ContextCase.RIGHT_ONLY
    return ContextCase.EMPTY


# Canonical JSONL field order; gold is omitted when absent.
_FIELDS = ("id", "source", "left_context", "right_context", "typed", "gold",
           "src_lang", "tgt_lang")


def instance_to_json(instance: WlacInstance) -> str:
    """Serialize one instance to its canonical single-line JSON form."""
    obj = {}
    for key in _FIELDS:
        value = getattr(instance, key)
        if key == "gold" and value is None:
            continue
        obj[key] = value
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def instance_from_json(line: str) -> WlacInstance:
    """Parse one canonical JSON line back into an instance.

    Unknown keys are rejected so that any parsed instance re-serializes
    byte-identically.
    """
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("instance line must be a JSON object")
    unknown = set(obj) - set(_FIELDS)
    if unknown:
        raise ValueError(f"unknown instance fields: {sorted(unknown)}")
    missing = set(_FIELDS) - {"gold"} - set(obj)
    if missing:
        raise ValueError(f"missing instance fields: {sorted(missing)}")
    return WlacInstance(**obj)


def read_instances(path: str | Path) -> Iterator[WlacInstance]:
    """Read a JSONL dataset file, skipping blank lines."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield instance_from_json(line)


def write_instances(path: str | Path, instances: Iterable[WlacInstance]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for instance in instances:
            fh.write(instance_to_json(instance) + "\n")
