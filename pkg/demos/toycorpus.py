"""Shared synthetic corpus for the demo scripts.

Twelve source words, each with a primary (65%) and secondary (35%)
translation whose initials are unique, arranged in cyclic runs so the
target side has a learnable word order.
"""

from wlac import RngState

SOURCE_WORDS = ["ka", "lo", "mi", "ru", "ta", "ve", "zo", "pa", "ne", "du", "fi", "go"]

TRANSLATIONS = {
    "ka": ("arbol", "banik"), "lo": ("cedro", "dalim"), "mi": ("ektor", "fulda"),
    "ru": ("gamon", "hilex"), "ta": ("ipsum", "jaret"), "ve": ("kulon", "lumet"),
    "zo": ("manor", "nexel"), "pa": ("orbit", "pulak"), "ne": ("quilo", "ramet"),
    "du": ("sinor", "tavel"), "fi": ("ulmos", "vigor"), "go": ("waxom", "xenit"),
}


def make_pairs(n_pairs, seed, min_len=8, max_len=11):
    rng = RngState.derive(seed, "demo-pairs")
    pairs = []
    for _ in range(n_pairs):
        length = min_len + rng.randint(max_len - min_len + 1)
        start = rng.randint(len(SOURCE_WORDS))
        sentence = [SOURCE_WORDS[(start + j) % len(SOURCE_WORDS)]
                    for j in range(length)]
        target = [TRANSLATIONS[w][0] if rng.uniform() < 0.65 else TRANSLATIONS[w][1]
                  for w in sentence]
        pairs.append((" ".join(sentence), " ".join(target)))
    return pairs


def train_demo_model(n_pairs=1200, seed=7, em_iterations=10):
    from wlac import train_lexbigram, train_subwords

    pairs = make_pairs(n_pairs, seed)
    lines = [s for s, _ in pairs] + [t for _, t in pairs]
    vocab = train_subwords(lines, vocab_size=400)
    encoded = [(vocab.encode(s), vocab.encode(t)) for s, t in pairs]
    model = train_lexbigram(encoded, vocab, em_iterations=em_iterations,
                            src_lang="toy", tgt_lang="en")
    return vocab, model
