#!/usr/bin/env python3
"""Subword codec and word tokenizers, end to end.

Trains a boundary-marked subword vocab on a tiny corpus, shows greedy
encoding with the ▁ marker, the lossless round trip, dialect-token
prepending, and the Latin / CJK word tokenizers with detokenization.
"""

from wlac import SubwordVocab, detokenize, train_subwords, word_tokenize

corpus = ["the cat sat on the mat", "the hat on the cat", "a cat and a hat"]
vocab = train_subwords(corpus, vocab_size=40, control_tokens=[">>cmn_Hans<<"])

print("pieces:", " ".join(vocab.pieces))
print()

for text in ["the cat", "that cat sat", "a hat on a mat"]:
    ids = vocab.encode(text)
    print(f"{text!r:22} -> {vocab.pieces_of(ids)} -> {vocab.decode(ids)!r}")

ids = vocab.encode("the cat", dialect_token=">>cmn_Hans<<")
print("\nwith dialect token:", vocab.pieces_of(ids))
print("decoded (control tokens dropped):", repr(vocab.decode(ids)))

print("\n-- Latin word tokenization --")
sentence = 'He said ("hi!"), then sat.'
words = word_tokenize(sentence, "en")
print(f"{sentence!r} -> {words}")
print("detokenized:", repr(detokenize(words, "en")))

print("\n-- CJK maximum matching --")
lexicon = {"我们", "喜欢", "学生"}
text = "我们喜欢学生"
words = word_tokenize(text, "zh", lexicon)
print(f"{text!r} -> {words}")
print("joined back:", repr(detokenize(words, "zh")))
