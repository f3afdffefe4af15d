"""Word-level auto-completion for interactive machine translation.

Given a source sentence, a partial target context, and the characters a
translator has typed, the engine predicts the intended target word by
generating diverse translation hypotheses (top-K sampling, optional
prefix-constrained decoding) and matching candidate words against the typed
sequence.

Subpackages / modules:

core          shared domain types, context-case classification, JSONL IO
tokenization  subword codec, Latin and CJK word tokenizers, detokenizer
translit      Pinyin romanization and back-mapping
model         translation model interface, scripted and statistical models
decoder       greedy / beam / top-K sampling / prefix-constrained decoding
completion    the end-to-end completion method
evalkit       dataset synthesis, accuracy metric, parameter sweeps
service       HTTP API (translate / suggest / complete)
cli           command-line entry points
"""

from .core import (ContextCase, DecodeConfig, Hypothesis, Prediction,
                   WlacInstance, classify_context, instance_from_json,
                   instance_to_json, read_instances, write_instances)
from .tokenization import (SubwordVocab, detokenize, train_subwords,
                           word_tokenize)
from .translit import PinyinTable, back_map, load_default_table, to_pinyin
from .model import (LexBigramModel, ScriptedModel, TranslationModel,
                    corpus_log_likelihood, train_lexbigram)
from .decoder import (RngState, beam_decode, decode_alternatives,
                      greedy_decode, sample_step, topk_candidates)
from .completion import (CaseMode, MatchPolicy, TargetScript, complete,
                         generate_candidates, match_word, should_constrain)
from .evalkit import (ResultRow, SweepSpec, evaluate, run_sweep,
                      synthesize_instances)

__version__ = "0.1.0"

__all__ = [
    "ContextCase", "DecodeConfig", "Hypothesis", "Prediction", "WlacInstance",
    "classify_context", "instance_from_json", "instance_to_json",
    "read_instances", "write_instances",
    "SubwordVocab", "detokenize", "train_subwords", "word_tokenize",
    "PinyinTable", "back_map", "load_default_table", "to_pinyin",
    "LexBigramModel", "ScriptedModel", "TranslationModel",
    "corpus_log_likelihood", "train_lexbigram",
    "RngState", "beam_decode", "decode_alternatives", "greedy_decode",
    "sample_step", "topk_candidates",
    "CaseMode", "MatchPolicy", "TargetScript", "complete",
    "generate_candidates", "match_word", "should_constrain",
    "ResultRow", "SweepSpec", "evaluate", "run_sweep", "synthesize_instances",
    "__version__",
]
