#!/usr/bin/env python3
"""The decoding modes side by side.

Greedy and beam search are deterministic and similar to each other; top-K
sampling produces a different set every seed; prefix-constrained
alternatives branch right after the forced target prefix.
"""

from toycorpus import train_demo_model

from wlac import DecodeConfig, RngState, beam_decode, decode_alternatives, greedy_decode

vocab, model = train_demo_model()
source = "ka lo mi ru ta ve zo pa"
source_tokens = model.encode_source(source)
print("source:", source)

print("\n-- greedy --")
hyp = greedy_decode(model, source_tokens, max_len=16)
print(f"  {vocab.decode(hyp.tokens)!r}  (score {hyp.score:.2f})")

print("\n-- beam search, width 5 --")
for hyp in beam_decode(model, source_tokens, beam_size=5, num_hypotheses=3,
                       max_len=16):
    print(f"  {vocab.decode(hyp.tokens)!r}  (score {hyp.score:.2f})")

print("\n-- top-10 sampling, 5 hypotheses, two seeds --")
config = DecodeConfig(sampling_topk=10, num_hypotheses=5, max_decode_len=16)
for seed in (0, 1):
    print(f"  seed {seed}:")
    for hyp in decode_alternatives(model, source_tokens, [], config,
                                   RngState(seed)):
        print(f"    {vocab.decode(hyp.tokens)!r}")

print("\n-- alternatives after the forced prefix 'arbol cedro' --")
prefix = model.encode_target("arbol cedro")
config = DecodeConfig(sampling_topk=0, num_hypotheses=5, max_decode_len=16)
for hyp in decode_alternatives(model, source_tokens, prefix, config,
                               RngState(0)):
    print(f"  arbol cedro + {vocab.decode(hyp.tokens)!r}  "
          f"(constrained={hyp.constrained})")
