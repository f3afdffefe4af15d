"""Pinyin romanization and prefix matching on romanized keys.

Romanization is lossy: distinct characters share a syllable, so mapping a
Pinyin key back to characters is only possible against a kept word list.
The shipped table is toneless and uses one fixed reading per character.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional


class PinyinTable:
    """Map from single Chinese character to its toneless Pinyin syllable."""

    def __init__(self, entries: Mapping[str, str]):
        table: Dict[str, str] = {}
        for char, syllable in entries.items():
            if len(char) != 1:
                raise ValueError(f"pinyin table keys must be single characters: {char!r}")
            if not syllable or not syllable.isascii() or syllable != syllable.lower():
                raise ValueError(
                    f"pinyin syllables must be non-empty lowercase ASCII: {syllable!r}"
                )
            table[char] = syllable
        self._table = table

    def __contains__(self, char: str) -> bool:
        return char in self._table

    def __len__(self) -> int:
        return len(self._table)

    def get(self, char: str) -> Optional[str]:
        return self._table.get(char)

    @classmethod
    def from_tsv(cls, path: str | Path) -> "PinyinTable":
        """Load a table file: char<TAB>syllable per line, UTF-8."""
        entries: Dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                try:
                    char, syllable = line.split("\t")
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: expected char<TAB>syllable") from exc
                entries[char] = syllable
        return cls(entries)


def load_default_table() -> PinyinTable:
    """Load the table shipped with the package."""
    path = resources.files("wlac").joinpath("data/pinyin.tsv")
    with resources.as_file(path) as real_path:
        return PinyinTable.from_tsv(real_path)


def to_pinyin(table: PinyinTable, word: str) -> str:
    """Concatenate per-character syllables.

    Characters absent from the table pass through unchanged (lowercased when
    ASCII), so mixed-script words like "A股" still get a usable match key.
    """
    parts: List[str] = []
    for char in word:
        syllable = table.get(char)
        if syllable is not None:
            parts.append(syllable)
        elif char.isascii():
            parts.append(char.lower())
        else:
            parts.append(char)
    return "".join(parts)


def back_map(table: PinyinTable, pinyin_key: str, word_list: Iterable[str]) -> List[str]:
    """All words whose romanization starts with ``pinyin_key``.

    Preserves the order of ``word_list``; duplicates removed keeping the
    first occurrence.  An empty result is valid.
    """
    seen = set()
    matches: List[str] = []
    for word in word_list:
        if word in seen:
            continue
        seen.add(word)
        if to_pinyin(table, word).startswith(pinyin_key):
            matches.append(word)
    return matches
