"""Dataset synthesis, the accuracy metric, and parameter sweeps.

Accuracy is the fraction of instances whose predicted word is exactly
string-equal to the gold word; absent predictions count as wrong.  Sweeps
evaluate a grid (or an explicit list) of decoding configurations per seed
and render both a machine-readable TSV and an aligned text table with the
columns Beam Size / Sampling / Top-K / Hypotheses / Accuracy / Runs.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .completion import complete, script_for_lang, TargetScript
from .core import ContextCase, DecodeConfig, WlacInstance
from .decoder import RngState
from .model import TranslationModel
from .tokenization import detokenize, word_tokenize
from .translit import PinyinTable, to_pinyin


@dataclass(frozen=True)
class ResultRow:
    """One evaluated (configuration, seed) cell."""

    config: DecodeConfig
    seed: int
    accuracy: float
    solved: int
    total: int
    mean_runs_used: float
    wall_time: float
    solved_ids: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SweepSpec:
    """A list of decode configurations to evaluate for every seed."""

    cells: Tuple[DecodeConfig, ...]
    seeds: Tuple[int, ...]
    dataset: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("sweep must contain at least one cell")
        if not self.seeds:
            raise ValueError("sweep must name at least one seed")

    @classmethod
    def from_axes(cls, beam_sizes: Sequence[int] = (1,),
                  sampling_topks: Sequence[int] = (0,),
                  num_hypotheses: Sequence[int] = (10,),
                  max_runs: Sequence[int] = (1,),
                  temperatures: Sequence[float] = (1.0,),
                  seeds: Sequence[int] = (0,),
                  dataset: Optional[str] = None,
                  base: DecodeConfig = DecodeConfig()) -> "SweepSpec":
        cells = tuple(
            replace(base, beam_size=b, sampling_topk=k, num_hypotheses=n,
                    max_runs=r, temperature=t)
            for b, k, n, r, t in itertools.product(
                beam_sizes, sampling_topks, num_hypotheses, max_runs, temperatures)
        )
        return cls(cells=cells, seeds=tuple(seeds), dataset=dataset)

    @classmethod
    def from_json(cls, path: str | Path) -> "SweepSpec":
        """Load a sweep file: either explicit "cells" or axis lists."""
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
        seeds = tuple(spec.get("seeds", [0]))
        dataset = spec.get("dataset")
        base = DecodeConfig(
            max_decode_len=spec.get("max_decode_len", 64),
            detok=spec.get("detok", True),
        )
        if "cells" in spec:
            cells = tuple(
                replace(base,
                        beam_size=cell.get("beam_size", 1),
                        sampling_topk=cell.get("sampling_topk", 0),
                        num_hypotheses=cell.get("num_hypotheses", 10),
                        max_runs=cell.get("max_runs", 1),
                        temperature=cell.get("temperature", 1.0),
                        temperature_max=cell.get("temperature_max"))
                for cell in spec["cells"]
            )
            return cls(cells=cells, seeds=seeds, dataset=dataset)
        return cls.from_axes(
            beam_sizes=spec.get("beam_size", [1]),
            sampling_topks=spec.get("sampling_topk", [0]),
            num_hypotheses=spec.get("num_hypotheses", [10]),
            max_runs=spec.get("max_runs", [1]),
            temperatures=spec.get("temperature", [1.0]),
            seeds=seeds, dataset=dataset, base=base)


def synthesize_instances(references: Sequence[Tuple[str, str]],
                         per_case_counts: Mapping[ContextCase, int],
                         min_typed: int, rng: RngState, *,
                         src_lang: str = "xx", tgt_lang: str = "en",
                         lexicon: Optional[Iterable[str]] = None,
                         pinyin: Optional[PinyinTable] = None,
                         max_attempts_per_instance: int = 200
                         ) -> List[WlacInstance]:
    """Build labeled completion problems from parallel reference pairs.

    For each instance a reference pair is drawn, a gold word is chosen
    uniformly among target words whose match key is longer than
    ``min_typed``, and the typed sequence is a random prefix of that key.
    Contexts are the remaining words with a random gap of 0-2 words dropped
    on each side of the gold (the unknown word need not be adjacent to its
    context), then truncated to realize the requested context case.
    """
    if not references:
        raise ValueError("references must be non-empty")
    if min_typed < 1:
        raise ValueError("min_typed must be >= 1")
    script = script_for_lang(tgt_lang)
    if script is TargetScript.HAN and (lexicon is None or pinyin is None):
        raise ValueError("Han targets require a lexicon and a Pinyin table")

    def match_key(word: str) -> str:
        return to_pinyin(pinyin, word) if script is TargetScript.HAN else word

    lang_for_words = "zh" if script is TargetScript.HAN else "en"
    instances: List[WlacInstance] = []
    counter = 0
    for case in (ContextCase.EMPTY, ContextCase.RIGHT_ONLY,
                 ContextCase.LEFT_ONLY, ContextCase.BOTH):
        remaining = per_case_counts.get(case, 0)
        while remaining > 0:
            for _ in range(max_attempts_per_instance):
                source, target = references[rng.randint(len(references))]
                words = [w for w in word_tokenize(target, lang_for_words, lexicon)
                         if w.strip()]
                eligible = [i for i, w in enumerate(words)
                            if len(match_key(w)) > min_typed]
                if not eligible:
                    continue
                index = eligible[rng.randint(len(eligible))]
                gold = words[index]
                key = match_key(gold)
                k = min_typed + rng.randint(len(key) - min_typed)
                typed = key[:k]
                gap_left = rng.randint(3)
                gap_right = rng.randint(3)
                left_words = words[:max(index - gap_left, 0)]
                right_words = words[index + 1 + gap_right:]
                left = detokenize(left_words, lang_for_words)
                right = detokenize(right_words, lang_for_words)
                if case in (ContextCase.EMPTY, ContextCase.RIGHT_ONLY):
                    left = ""
                if case in (ContextCase.EMPTY, ContextCase.LEFT_ONLY):
                    right = ""
                if case in (ContextCase.LEFT_ONLY, ContextCase.BOTH) and not left.strip():
                    continue
                if case in (ContextCase.RIGHT_ONLY, ContextCase.BOTH) and not right.strip():
                    continue
                counter += 1
                instances.append(WlacInstance(
                    id=f"{case.value}-{counter:04d}", source=source,
                    left_context=left, right_context=right, typed=typed,
                    gold=gold, src_lang=src_lang, tgt_lang=tgt_lang))
                remaining -= 1
                break
            else:
                raise ValueError(
                    f"could not synthesize a {case.value} instance from the "
                    f"given references after {max_attempts_per_instance} attempts")
    return instances


def evaluate(model: TranslationModel, instances: Sequence[WlacInstance],
             config: DecodeConfig, seed: int, *,
             pinyin: Optional[PinyinTable] = None,
             lexicon: Optional[Iterable[str]] = None) -> ResultRow:
    """Score one configuration on a labeled dataset.

    Every instance gets its own RNG stream derived from (seed, instance id),
    so results are reproducible and instances may be processed in any order.
    """
    if not instances:
        raise ValueError("cannot evaluate an empty instance list")
    for instance in instances:
        if instance.gold is None:
            raise ValueError(f"instance {instance.id} has no gold word")
    start = time.perf_counter()
    solved_ids: List[str] = []
    runs_total = 0
    for instance in instances:
        rng = RngState.derive(seed, instance.id)
        prediction = complete(model, instance, config, rng,
                              pinyin=pinyin, lexicon=lexicon)
        if prediction is None:
            runs_total += 1 if config.sampling_topk == 0 else config.max_runs
        else:
            runs_total += prediction.runs_used
            if prediction.word == instance.gold:
                solved_ids.append(instance.id)
    wall = time.perf_counter() - start
    total = len(instances)
    return ResultRow(config=config, seed=seed,
                     accuracy=len(solved_ids) / total, solved=len(solved_ids),
                     total=total, mean_runs_used=runs_total / total,
                     wall_time=wall, solved_ids=tuple(solved_ids))


def run_sweep(model: TranslationModel, spec: SweepSpec,
              instances: Optional[Sequence[WlacInstance]] = None, *,
              pinyin: Optional[PinyinTable] = None,
              lexicon: Optional[Iterable[str]] = None
              ) -> Tuple[List[ResultRow], str]:
    """Evaluate every cell of the sweep for every seed.

    Returns the rows in grid order plus the rendered text table.  A failing
    cell aborts the sweep with the cell identity attached to the error.
    """
    if instances is None:
        if spec.dataset is None:
            raise ValueError("sweep spec names no dataset and none was passed")
        from .core import read_instances
        instances = list(read_instances(spec.dataset))
    rows: List[ResultRow] = []
    for cell in spec.cells:
        for seed in spec.seeds:
            try:
                rows.append(evaluate(model, instances, cell, seed,
                                     pinyin=pinyin, lexicon=lexicon))
            except Exception as exc:
                raise RuntimeError(
                    f"sweep cell failed (beam_size={cell.beam_size}, "
                    f"sampling_topk={cell.sampling_topk}, "
                    f"num_hypotheses={cell.num_hypotheses}, "
                    f"max_runs={cell.max_runs}, seed={seed}): {exc}") from exc
    return rows, render_table(rows)


_TSV_COLUMNS = ("beam_size", "sampling_topk", "num_hypotheses", "max_runs",
                "temperature", "temperature_max", "seed", "accuracy",
                "solved", "total", "mean_runs_used", "wall_time")


def rows_to_tsv(rows: Sequence[ResultRow]) -> str:
    lines = ["\t".join(_TSV_COLUMNS)]
    for row in rows:
        cfg = row.config
        lines.append("\t".join(str(v) for v in (
            cfg.beam_size, cfg.sampling_topk, cfg.num_hypotheses, cfg.max_runs,
            cfg.temperature, cfg.temperature_max if cfg.temperature_max is not None else "",
            row.seed, f"{row.accuracy:.6f}", row.solved, row.total,
            f"{row.mean_runs_used:.4f}", f"{row.wall_time:.3f}")))
    return "\n".join(lines) + "\n"


def render_table(rows: Sequence[ResultRow]) -> str:
    """Aligned text table; seeds of one cell are pooled into mean ± sd."""
    groups: Dict[DecodeConfig, List[ResultRow]] = {}
    order: List[DecodeConfig] = []
    for row in rows:
        if row.config not in groups:
            groups[row.config] = []
            order.append(row.config)
        groups[row.config].append(row)

    header = ("Beam Size", "Sampling", "Top-K", "Hypotheses", "Accuracy", "Runs")
    body: List[Tuple[str, ...]] = []
    for cfg in order:
        cell_rows = groups[cfg]
        accs = [r.accuracy for r in cell_rows]
        mean = sum(accs) / len(accs)
        if len(accs) > 1:
            sd = math.sqrt(sum((a - mean) ** 2 for a in accs) / (len(accs) - 1))
            acc_text = f"{mean:.4f} ±{sd:.4f}"
        else:
            acc_text = f"{mean:.4f}"
        body.append((
            str(cfg.beam_size),
            "N/A" if cfg.sampling_topk == 0 else "random",
            "" if cfg.sampling_topk == 0 else str(cfg.sampling_topk),
            str(cfg.num_hypotheses),
            acc_text,
            str(cfg.max_runs),
        ))

    widths = [max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
              for i in range(len(header))]
    def fmt(cells: Tuple[str, ...]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()
    lines = [fmt(header), fmt(tuple("-" * w for w in widths))]
    lines.extend(fmt(row) for row in body)
    return "\n".join(lines) + "\n"
