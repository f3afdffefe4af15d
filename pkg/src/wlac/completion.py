"""End-to-end word completion: generate diverse hypotheses, then find the
word that starts with the typed sequence.

For entries whose left context starts with a capital letter the context is
also fed to the decoder as a target prefix, yielding a second, constrained
candidate set that is scanned first.  The right context is never consulted.
If no candidate word matches, the whole process repeats for up to
``max_runs`` runs; with sampling enabled each run can produce new
alternatives, without sampling a retry would be identical so the engine
stops after one run.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Tuple

from .core import DecodeConfig, Hypothesis, Prediction, WlacInstance, is_han_lang
from .decoder import RngState, decode_alternatives
from .model import TranslationModel
from .tokenization import SubwordVocab, detokenize, word_tokenize
from .translit import PinyinTable, to_pinyin


class CaseMode(Enum):
    EXACT_THEN_FOLD = "exact_then_fold"
    EXACT_ONLY = "exact_only"


class TargetScript(Enum):
    LATIN = "latin"
    HAN = "han"


@dataclass(frozen=True)
class MatchPolicy:
    """How candidate words are matched against the typed sequence."""

    detok: bool = True
    case_mode: CaseMode = CaseMode.EXACT_THEN_FOLD
    target_script: TargetScript = TargetScript.LATIN


def script_for_lang(lang: str) -> TargetScript:
    return TargetScript.HAN if is_han_lang(lang) else TargetScript.LATIN


def should_constrain(left_context: str, target_script: TargetScript,
                     han_always: bool = True) -> bool:
    """Use the left context as a decoder prefix?

    Cased scripts: only when the trimmed context starts with an uppercase
    letter (mid-sentence contexts mislead more than they help).  Han has no
    case; by default any non-empty context constrains, which ``han_always``
    can switch off.
    """
    trimmed = left_context.strip()
    if not trimmed:
        return False
    if target_script is TargetScript.HAN:
        return han_always
    return trimmed[0].isupper()


def generate_candidates(model: TranslationModel, instance: WlacInstance,
                        config: DecodeConfig, rng: RngState,
                        run_index: int = 0,
                        han_constrain: bool = True) -> List[Hypothesis]:
    """Produce the candidate hypothesis list for one instance.

    Always contains ``num_hypotheses`` unconstrained hypotheses; when the
    left context qualifies, a prefix-constrained set of the same size is
    generated first and listed first (it respects more context, so it gets
    priority).  The right context is ignored entirely.
    """
    source_tokens = model.encode_source(instance.source)
    script = script_for_lang(instance.tgt_lang)
    candidates: List[Hypothesis] = []
    if should_constrain(instance.left_context, script, han_always=han_constrain):
        prefix = model.encode_target(instance.left_context.strip())
        candidates.extend(decode_alternatives(model, source_tokens, prefix,
                                              config, rng, run_index=run_index))
    candidates.extend(decode_alternatives(model, source_tokens, [],
                                          config, rng, run_index=run_index))
    return candidates


def _candidate_words(hypothesis: Hypothesis, vocab: SubwordVocab,
                     policy: MatchPolicy, lexicon: Optional[Iterable[str]]) -> List[str]:
    text = vocab.decode(hypothesis.tokens)
    if policy.target_script is TargetScript.HAN:
        if policy.detok:
            text = detokenize(text.split(), "zh")
        words = word_tokenize(text, "zh", lexicon)
    else:
        if policy.detok:
            text = detokenize(text.split(), "en")
        words = word_tokenize(text, "en")
    return [w for w in words if w.strip()]


def match_word(hypotheses: List[Hypothesis], typed: str, policy: MatchPolicy,
               vocab: SubwordVocab, pinyin: Optional[PinyinTable] = None,
               lexicon: Optional[Iterable[str]] = None
               ) -> Optional[Tuple[str, Hypothesis]]:
    """Scan hypotheses in order and return the first word whose match key
    starts with the typed sequence.

    Latin keys are the words themselves, matched with exact case first; if
    no exact-case match exists anywhere and the policy allows it, a second
    case-folded pass runs.  Han keys are Pinyin romanizations.  When several
    words match, the first one wins.
    """
    if not typed:
        raise ValueError("typed sequence must be non-empty")
    if policy.target_script is TargetScript.HAN:
        if pinyin is None or lexicon is None:
            raise ValueError("Han matching requires a Pinyin table and a lexicon")

    decoded = [(_candidate_words(h, vocab, policy, lexicon), h) for h in hypotheses]

    if policy.target_script is TargetScript.HAN:
        for words, hypothesis in decoded:
            for word in words:
                if to_pinyin(pinyin, word).startswith(typed):
                    return word, hypothesis
        return None

    for words, hypothesis in decoded:
        for word in words:
            if word.startswith(typed):
                return word, hypothesis
    if policy.case_mode is CaseMode.EXACT_THEN_FOLD:
        folded = typed.casefold()
        for words, hypothesis in decoded:
            for word in words:
                if word.casefold().startswith(folded):
                    return word, hypothesis
    return None


def complete(model: TranslationModel, instance: WlacInstance,
             config: DecodeConfig, rng: RngState, *,
             pinyin: Optional[PinyinTable] = None,
             lexicon: Optional[Iterable[str]] = None,
             case_mode: CaseMode = CaseMode.EXACT_THEN_FOLD,
             han_constrain: bool = True) -> Optional[Prediction]:
    """Run the full completion method for one instance.

    Each run draws a fresh temperature when a range is configured, generates
    candidates, and tries to match the typed sequence.  Deterministic
    configurations never retry beyond the first run; sampling retries up to
    ``config.max_runs`` times on the shared RNG stream.
    """
    policy = MatchPolicy(detok=config.detok, case_mode=case_mode,
                         target_script=script_for_lang(instance.tgt_lang))
    for run in range(1, config.max_runs + 1):
        run_config = config
        if config.temperature_max is not None and config.temperature_max > config.temperature:
            run_config = config.with_temperature(
                rng.uniform_range(config.temperature, config.temperature_max))
        elif config.temperature_max is not None:
            run_config = config.with_temperature(config.temperature)
        candidates = generate_candidates(model, instance, run_config, rng,
                                         run_index=run - 1,
                                         han_constrain=han_constrain)
        matched = match_word(candidates, instance.typed, policy, model.vocab,
                             pinyin=pinyin, lexicon=lexicon)
        if matched is not None:
            word, hypothesis = matched
            return Prediction(word=word, source_hypothesis=hypothesis, runs_used=run)
        if config.sampling_topk == 0:
            break  # identical candidates every run; retrying cannot help
    return None
