#!/usr/bin/env python3
"""Train the lexical+bigram model and inspect what EM learned.

Every source word of the toy corpus has two plausible translations, split
65/35.  After a few EM iterations the lexical table recovers that split,
and the corpus log-likelihood climbs monotonically.
"""

from toycorpus import SOURCE_WORDS, TRANSLATIONS, make_pairs, train_demo_model

from wlac.model import corpus_log_likelihood, lexical_prob

vocab, model = train_demo_model()

print("corpus log-likelihood per EM iteration:")
for k, value in enumerate(model.likelihood_history):
    print(f"  after {k:2d} iterations: {value:12.2f}")

pairs = make_pairs(1200, 7)
encoded = [(vocab.encode(s), vocab.encode(t)) for s, t in pairs]
print(f"  final              : {corpus_log_likelihood(model, encoded):12.2f}")

print("\nlearned lexical preferences (true split is 0.65 / 0.35; dense")
print("co-occurrence leaks some mass to neighbors, the ratio is what counts):")
for word in SOURCE_WORDS[:6]:
    primary, secondary = TRANSLATIONS[word]
    p1 = lexical_prob(model, "▁" + word, "▁" + primary)
    p2 = lexical_prob(model, "▁" + word, "▁" + secondary)
    print(f"  t({primary:6s}|{word}) = {p1:.3f}   t({secondary:6s}|{word}) = {p2:.3f}"
          f"   ratio {p1 / (p1 + p2):.2f}:{p2 / (p1 + p2):.2f}")

dist = model.next_distribution(model.encode_source("ka lo mi ru ta ve zo pa"), [])
best = sorted(range(len(dist)), key=lambda i: -dist[i])[:5]
print("\ntop next-token candidates at the start of decoding:")
for token in best:
    print(f"  {vocab.id_to_piece(token):10s} p={dist[token]:.3f}")
