"""Translation models: interface contracts, EM training against an
independent reference implementation, and serialization round trips.
"""

import math

import numpy as np
import pytest

from wlac.decoder import RngState
from wlac.model import (LexBigramModel, ScriptedModel, corpus_log_likelihood,
                        lexical_prob, train_lexbigram)
from wlac.tokenization import SubwordVocab


# -- independent oracle -------------------------------------------------------
# Reference IBM Model 1 over plain string tokens, written directly from the
# likelihood/count equations.  NULL is the token None; initialization is
# uniform over the target types co-occurring with each source type.

def oracle_em(pairs, iterations):
    support = {}
    for f_sent, e_sent in pairs:
        for f in set(f_sent) | {None}:
            support.setdefault(f, set()).update(e_sent)
    t = {f: {e: 1.0 / len(es) for e in es} for f, es in support.items()}
    for _ in range(iterations):
        count = {f: {} for f in t}
        total = {f: 0.0 for f in t}
        for f_sent, e_sent in pairs:
            fs = list(f_sent) + [None]
            for e in e_sent:
                z = sum(t[f].get(e, 0.0) for f in fs)
                for f in fs:
                    c = t[f].get(e, 0.0) / z
                    count[f][e] = count[f].get(e, 0.0) + c
                    total[f] += c
        t = {f: {e: c / total[f] for e, c in row.items()} for f, row in count.items()}
    return t


def oracle_log_likelihood(t, pairs):
    ll = 0.0
    for f_sent, e_sent in pairs:
        fs = list(f_sent) + [None]
        for e in e_sent:
            ll += math.log(sum(t[f].get(e, 0.0) for f in fs) / len(fs))
    return ll


WORD_PAIRS = [("a b", "x y"), ("a", "x")]


def encode_pairs(vocab, pairs):
    return [(vocab.encode(s), vocab.encode(t)) for s, t in pairs]


class TestScriptedModel:
    def test_returns_scripted_distribution_exactly(self):
        model = ScriptedModel({(): [0.5, 0.3, 0.2]}, default=[1.0, 0.0, 0.0],
                              eos_id=2)
        np.testing.assert_array_equal(model.next_distribution([], []),
                                      [0.5, 0.3, 0.2])

    def test_default_for_unlisted_prefix(self):
        model = ScriptedModel({}, default=[0.25, 0.25, 0.5], eos_id=0)
        np.testing.assert_array_equal(model.next_distribution([9], [1, 2]),
                                      [0.25, 0.25, 0.5])

    def test_rejects_unnormalized_distribution(self):
        with pytest.raises(ValueError):
            ScriptedModel({}, default=[0.5, 0.4], eos_id=0)

    def test_source_is_ignored(self):
        model = ScriptedModel({(1,): [0.0, 1.0]}, default=[1.0, 0.0], eos_id=0)
        np.testing.assert_array_equal(model.next_distribution([1, 2], (1,)),
                                      model.next_distribution([], (1,)))


class TestTrainLexBigram:
    def test_matches_oracle_em_exactly(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        model = train_lexbigram(encoded, word_vocab, em_iterations=5)
        word_pairs = [(s.split(), t.split()) for s, t in WORD_PAIRS]
        reference = oracle_em(word_pairs, 5)
        for f_word, row in reference.items():
            f_piece = "<null>" if f_word is None else "▁" + f_word
            for e_word, prob in row.items():
                got = lexical_prob(model, f_piece, "▁" + e_word)
                assert got == pytest.approx(prob, abs=1e-12)

    def test_cooccurrence_forces_inequality(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        model = train_lexbigram(encoded, word_vocab, em_iterations=5)
        assert lexical_prob(model, "▁a", "▁x") > \
            lexical_prob(model, "▁a", "▁y")

    def test_single_pair_concentrates_on_the_only_target(self, word_vocab):
        encoded = encode_pairs(word_vocab, [("a", "x")])
        model = train_lexbigram(encoded, word_vocab, em_iterations=5)
        assert lexical_prob(model, "▁a", "▁x") == pytest.approx(1.0)

    def test_zero_iterations_gives_uniform_over_cooccurring(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        model = train_lexbigram(encoded, word_vocab, em_iterations=0)
        assert lexical_prob(model, "▁a", "▁x") == pytest.approx(0.5)
        assert lexical_prob(model, "▁a", "▁y") == pytest.approx(0.5)

    def test_empty_corpus_rejected(self, word_vocab):
        with pytest.raises(ValueError):
            train_lexbigram([], word_vocab)
        with pytest.raises(ValueError):
            train_lexbigram([([], [])], word_vocab)

    def test_lexical_rows_normalized(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        model = train_lexbigram(encoded, word_vocab, em_iterations=3)
        for row in model._lexical.values():
            assert sum(row.values()) == pytest.approx(1.0, abs=1e-6)
        assert sum(model._null_row.values()) == pytest.approx(1.0, abs=1e-6)


class TestCorpusLogLikelihood:
    def test_matches_oracle(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        word_pairs = [(s.split(), t.split()) for s, t in WORD_PAIRS]
        for iters in (0, 1, 3):
            model = train_lexbigram(encoded, word_vocab, em_iterations=iters)
            expected = oracle_log_likelihood(oracle_em(word_pairs, iters), word_pairs)
            assert corpus_log_likelihood(model, encoded) == \
                pytest.approx(expected, abs=1e-12)

    def test_uniform_table_single_pair(self, word_vocab):
        # Both alignment candidates (NULL and the one source token) give the
        # single co-occurring target probability 1, so the sentence scores
        # log((1 + 1) / 2) = 0 under the uniform initialization.
        encoded = encode_pairs(word_vocab, [("a", "x")])
        model = train_lexbigram(encoded, word_vocab, em_iterations=0)
        assert corpus_log_likelihood(model, encoded) == pytest.approx(0.0)

    def test_em_never_decreases_it(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        values = []
        for iters in range(6):
            model = train_lexbigram(encoded, word_vocab, em_iterations=iters)
            values.append(corpus_log_likelihood(model, encoded))
        for before, after in zip(values, values[1:]):
            assert after >= before - 1e-9

    def test_history_tracks_per_iteration_likelihood(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        model = train_lexbigram(encoded, word_vocab, em_iterations=4)
        assert len(model.likelihood_history) == 4
        for iters, recorded in enumerate(model.likelihood_history):
            snapshot = train_lexbigram(encoded, word_vocab, em_iterations=iters)
            assert corpus_log_likelihood(snapshot, encoded) == \
                pytest.approx(recorded, abs=1e-12)

    def test_empty_corpus_scores_zero(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        model = train_lexbigram(encoded, word_vocab, em_iterations=1)
        assert corpus_log_likelihood(model, []) == 0.0


class TestNextDistribution:
    def test_valid_distribution_everywhere(self, toy_model):
        rng = RngState(5)
        src = toy_model.encode_source("ka lo mi")
        prefix = []
        for _ in range(20):
            dist = toy_model.next_distribution(src, prefix)
            assert dist.shape == (toy_model.vocab_size,)
            assert np.all(dist >= 0)
            assert abs(dist.sum() - 1.0) < 1e-9
            prefix.append(rng.randint(toy_model.vocab_size))

    def test_purity_bitwise(self, toy_model):
        src = toy_model.encode_source("ka lo")
        prefix = toy_model.encode_target("arbol")
        first = toy_model.next_distribution(src, prefix)
        second = toy_model.next_distribution(src, prefix)
        assert np.array_equal(first, second)

    def test_lexical_pull_toward_translation(self, word_vocab):
        encoded = encode_pairs(word_vocab, WORD_PAIRS)
        model = train_lexbigram(encoded, word_vocab, em_iterations=5)
        dist = model.next_distribution(word_vocab.encode("a"), [])
        non_eos = [i for i in range(len(word_vocab)) if i != model.eos_id]
        best = max(non_eos, key=lambda i: dist[i])
        assert word_vocab.id_to_piece(best) == "▁x"

    def test_unknown_ids_rejected(self, toy_model):
        with pytest.raises(ValueError):
            toy_model.next_distribution([toy_model.vocab_size], [])
        with pytest.raises(ValueError):
            toy_model.next_distribution([0], [toy_model.vocab_size])


class TestSerialization:
    def test_round_trip_reproduces_distributions(self, toy_model, tmp_path):
        toy_model.save(tmp_path / "model")
        loaded = LexBigramModel.load(tmp_path / "model")
        assert loaded.src_lang == toy_model.src_lang
        assert loaded.likelihood_history == toy_model.likelihood_history
        src = toy_model.encode_source("ka lo mi ru")
        for prefix_text in ["", "arbol", "arbol cedro"]:
            prefix = toy_model.encode_target(prefix_text)
            np.testing.assert_array_equal(
                loaded.next_distribution(src, prefix),
                toy_model.next_distribution(src, prefix))

    def test_model_dir_has_four_files(self, toy_model, tmp_path):
        toy_model.save(tmp_path / "model")
        names = sorted(p.name for p in (tmp_path / "model").iterdir())
        assert names == ["bigram.tsv", "lexical.tsv", "meta.json", "vocab.txt"]
