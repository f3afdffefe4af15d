#!/usr/bin/env python3
"""Word-level auto-completion end to end.

Builds completion problems by hand, then shows how the engine finds the
word the typed characters point at, how retries rescue rare words, and how
Pinyin match keys work for a Chinese target.
"""

from toycorpus import train_demo_model

from wlac import (DecodeConfig, RngState, SubwordVocab, WlacInstance, complete)
from wlac.model import ScriptedModel
from wlac.translit import PinyinTable

vocab, model = train_demo_model()

config = DecodeConfig(sampling_topk=10, num_hypotheses=10, max_runs=5,
                      max_decode_len=16)

print("-- typed characters pick the intended word --")
for typed in ["a", "ba", "ce", "x"]:
    instance = WlacInstance(id=f"demo-{typed}", source="ka lo mi ru ta ve zo pa fi go",
                            left_context="", right_context="", typed=typed,
                            src_lang="toy", tgt_lang="en")
    prediction = complete(model, instance, config, RngState.derive(0, instance.id))
    if prediction is None:
        print(f"  typed {typed!r:5} -> NO_MATCH")
    else:
        print(f"  typed {typed!r:5} -> {prediction.word!r:10} "
              f"(run {prediction.runs_used}, "
              f"constrained={prediction.source_hypothesis.constrained})")

print("\n-- retries rescue words the first sample set missed --")
hits = {1: 0, 5: 0}
trials = 200
for max_runs in (1, 5):
    run_config = DecodeConfig(sampling_topk=10, num_hypotheses=10,
                              max_runs=max_runs, max_decode_len=16)
    for k in range(trials):
        instance = WlacInstance(id=f"retry-{k}", source="ka lo mi ru ta ve zo pa",
                                left_context="", right_context="", typed="j",
                                src_lang="toy", tgt_lang="en")
        if complete(model, instance, run_config,
                    RngState.derive(k, "retry")) is not None:
            hits[max_runs] += 1
print(f"  typed 'j' solved in {hits[1]}/{trials} trials with 1 run, "
      f"{hits[5]}/{trials} with up to 5 runs")

print("\n-- Chinese targets match on Pinyin --")
pieces = ["<unk>", "</s>", "▁", "▁他", "▁去", "▁学"]
zh_vocab = SubwordVocab(pieces)
zh_model = ScriptedModel(
    {(): [0.0, 0.0, 0.0, 0.7, 0.2, 0.1],
     (3,): [0.0, 0.0, 0.0, 0.0, 0.8, 0.2]},
    default=[0.0, 1.0, 0.0, 0.0, 0.0, 0.0], eos_id=1, text_vocab=zh_vocab)
table = PinyinTable({"他": "ta", "去": "qu", "学": "xue"})
lexicon = frozenset({"他", "去", "学"})
instance = WlacInstance(id="zh-1", source="he goes", left_context="",
                        right_context="", typed="qu", src_lang="en",
                        tgt_lang="zh")
prediction = complete(zh_model, instance, config, RngState(0),
                      pinyin=table, lexicon=lexicon)
print(f"  typed 'qu' -> {prediction.word!r} (matched via Pinyin)")
