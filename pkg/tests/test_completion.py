"""The end-to-end completion method: constraining heuristic, candidate
ordering, typed-sequence matching, and the retry loop.
"""

import pytest

from wlac.completion import (CaseMode, MatchPolicy, TargetScript, complete,
                             generate_candidates, match_word, should_constrain)
from wlac.core import DecodeConfig, Hypothesis, WlacInstance
from wlac.decoder import RngState
from wlac.model import ScriptedModel, TranslationModel
from wlac.tokenization import SubwordVocab
from wlac.translit import PinyinTable


def make_instance(**overrides):
    fields = dict(id="i1", source="ka lo mi", left_context="",
                  right_context="", typed="a", src_lang="toy", tgt_lang="en")
    fields.update(overrides)
    return WlacInstance(**fields)


class TestShouldConstrain:
    def test_capitalized_left_context(self):
        assert should_constrain("The cat", TargetScript.LATIN)

    def test_lowercase_left_context(self):
        assert not should_constrain("the cat", TargetScript.LATIN)

    def test_empty(self):
        assert not should_constrain("", TargetScript.LATIN)
        assert not should_constrain("   ", TargetScript.LATIN)

    def test_leading_whitespace_trimmed(self):
        assert should_constrain("  The cat", TargetScript.LATIN)

    def test_han_constrains_whenever_non_empty(self):
        assert should_constrain("他去", TargetScript.HAN)
        assert not should_constrain("", TargetScript.HAN)

    def test_non_letter_start_does_not_constrain(self):
        assert not should_constrain("3 cats", TargetScript.LATIN)


WORD_PIECES = ["<unk>", "</s>", "▁", "▁the", "▁cat", "▁can",
               "▁sat", "▁The", "▁Cat"]


@pytest.fixture
def match_vocab():
    return SubwordVocab(WORD_PIECES)


def hyp(vocab, text, constrained=False, score=-1.0):
    tokens = tuple(vocab.encode(text))
    return Hypothesis(tokens=tokens, score=score, constrained=constrained)


class TestMatchWord:
    def test_first_matching_word_wins_within_hypothesis(self, match_vocab):
        policy = MatchPolicy()
        result = match_word([hyp(match_vocab, "can cat")], "ca", policy, match_vocab)
        assert result is not None and result[0] == "can"

    def test_unique_prefix_match(self, match_vocab):
        policy = MatchPolicy()
        result = match_word([hyp(match_vocab, "the cat sat")], "c", policy,
                            match_vocab)
        assert result[0] == "cat"

    def test_hypothesis_order_priority(self, match_vocab):
        policy = MatchPolicy()
        first = hyp(match_vocab, "the sat")
        second = hyp(match_vocab, "the cat")
        result = match_word([first, second], "ca", policy, match_vocab)
        assert result == ("cat", second)

    def test_exact_case_beats_folded_anywhere(self, match_vocab):
        # A later exact-case match outranks an earlier case-folded one.
        policy = MatchPolicy()
        folded_first = hyp(match_vocab, "The Cat")
        exact_later = hyp(match_vocab, "the cat")
        result = match_word([folded_first, exact_later], "ca", policy, match_vocab)
        assert result == ("cat", exact_later)

    def test_fold_pass_used_when_no_exact_match(self, match_vocab):
        policy = MatchPolicy()
        result = match_word([hyp(match_vocab, "The cat")], "th", policy,
                            match_vocab)
        assert result[0] == "The"

    def test_exact_only_mode_skips_fold_pass(self, match_vocab):
        policy = MatchPolicy(case_mode=CaseMode.EXACT_ONLY)
        assert match_word([hyp(match_vocab, "The cat")], "th", policy,
                          match_vocab) is None

    def test_no_match_returns_none(self, match_vocab):
        policy = MatchPolicy()
        assert match_word([hyp(match_vocab, "the cat")], "zz", policy,
                          match_vocab) is None

    def test_returned_word_satisfies_predicate(self, match_vocab):
        policy = MatchPolicy()
        for typed in ("t", "th", "c", "ca", "s"):
            result = match_word([hyp(match_vocab, "the can sat")], typed,
                                policy, match_vocab)
            if result is not None:
                assert result[0].casefold().startswith(typed.casefold())

    def test_empty_typed_rejected(self, match_vocab):
        with pytest.raises(ValueError):
            match_word([], "", MatchPolicy(), match_vocab)


HAN_PIECES = ["<unk>", "</s>", "▁", "▁他", "▁去"]
HAN_TABLE = PinyinTable({"他": "ta", "去": "qu"})
HAN_LEXICON = frozenset({"他", "去"})


class TestHanMatch:
    def test_pinyin_prefix_match(self):
        vocab = SubwordVocab(HAN_PIECES)
        policy = MatchPolicy(target_script=TargetScript.HAN)
        result = match_word([hyp(vocab, "他 去")], "ta", policy, vocab,
                            pinyin=HAN_TABLE, lexicon=HAN_LEXICON)
        assert result[0] == "他"

    def test_requires_table_and_lexicon(self):
        vocab = SubwordVocab(HAN_PIECES)
        policy = MatchPolicy(target_script=TargetScript.HAN)
        with pytest.raises(ValueError):
            match_word([hyp(vocab, "他")], "ta", policy, vocab)

    def test_pinyin_key_crossing_word_boundary(self):
        pieces = ["<unk>", "</s>", "▁", "▁我们"]
        vocab = SubwordVocab(pieces)
        table = PinyinTable({"我": "wo", "们": "men"})
        policy = MatchPolicy(target_script=TargetScript.HAN)
        result = match_word([hyp(vocab, "我们")], "wom", policy, vocab,
                            pinyin=table, lexicon=frozenset({"我们"}))
        assert result[0] == "我们"


class TestGenerateCandidates:
    def test_empty_case_yields_unconstrained_only(self, toy_model):
        config = DecodeConfig(num_hypotheses=5, sampling_topk=0, max_decode_len=8)
        candidates = generate_candidates(toy_model, make_instance(),
                                         config, RngState(0))
        assert len(candidates) == 5
        assert all(not c.constrained for c in candidates)

    def test_capitalized_left_context_doubles_candidates(self, toy_model):
        config = DecodeConfig(num_hypotheses=5, sampling_topk=0, max_decode_len=8)
        instance = make_instance(left_context="Arbol cedro")
        candidates = generate_candidates(toy_model, instance, config, RngState(0))
        assert len(candidates) == 10
        assert all(c.constrained for c in candidates[:5])
        assert all(not c.constrained for c in candidates[5:])

    def test_lowercase_left_context_does_not_constrain(self, toy_model):
        config = DecodeConfig(num_hypotheses=5, sampling_topk=0, max_decode_len=8)
        instance = make_instance(left_context="arbol cedro")
        candidates = generate_candidates(toy_model, instance, config, RngState(0))
        assert len(candidates) == 5

    def test_right_context_never_consulted(self, toy_model):
        config = DecodeConfig(num_hypotheses=6, sampling_topk=10, max_decode_len=8)
        with_right = make_instance(left_context="Arbol", right_context="gamon ipsum")
        without = make_instance(left_context="Arbol")
        a = generate_candidates(toy_model, with_right, config, RngState(42))
        b = generate_candidates(toy_model, without, config, RngState(42))
        assert [(c.tokens, c.score, c.constrained) for c in a] == \
            [(c.tokens, c.score, c.constrained) for c in b]


def scripted_completion_model():
    """Deterministic argmax path says "aa"; "bb" is reachable only through
    sampling (probability 0.1 at the branch position)."""
    pieces = ["<unk>", "</s>", "▁", "▁aa", "▁bb"]
    vocab = SubwordVocab(pieces)
    eos = vocab.eos_id
    table = {
        (): [0.0, 0.0, 0.0, 0.9, 0.1],
        (3,): [0.0, 1.0, 0.0, 0.0, 0.0],
        (4,): [0.0, 1.0, 0.0, 0.0, 0.0],
    }
    default = [0.0, 1.0, 0.0, 0.0, 0.0]
    return ScriptedModel(table, default=default, eos_id=eos, text_vocab=vocab)


class TestComplete:
    def test_immediate_hit_uses_one_run(self):
        model = scripted_completion_model()
        config = DecodeConfig(num_hypotheses=1, sampling_topk=0, max_runs=5,
                              max_decode_len=4)
        prediction = complete(model, make_instance(typed="a"), config, RngState(0))
        assert prediction.word == "aa"
        assert prediction.runs_used == 1

    def test_deterministic_no_match_stops_after_one_pass(self):
        inner = scripted_completion_model()

        class Recorder(TranslationModel):
            def __init__(self):
                self.branch_calls = 0

            @property
            def vocab_size(self):
                return inner.vocab_size

            @property
            def eos_id(self):
                return inner.eos_id

            @property
            def vocab(self):
                return inner.vocab

            def next_distribution(self, source_tokens, target_prefix_tokens):
                if len(target_prefix_tokens) == 0:
                    self.branch_calls += 1
                return inner.next_distribution(source_tokens, target_prefix_tokens)

        model = Recorder()
        config = DecodeConfig(num_hypotheses=2, sampling_topk=0, max_runs=5,
                              max_decode_len=4)
        prediction = complete(model, make_instance(typed="zz"), config, RngState(0))
        assert prediction is None
        assert model.branch_calls == 1

    def test_sampling_retries_raise_success_rate(self):
        # Per-run hit probability for "bb" is exactly 0.1, so five runs
        # succeed with probability 1 - 0.9^5 = 0.40951.
        model = scripted_completion_model()
        trials = 1000
        hits = {1: 0, 5: 0}
        for runs in (1, 5):
            config = DecodeConfig(num_hypotheses=1, sampling_topk=2,
                                  max_runs=runs, max_decode_len=4)
            for k in range(trials):
                rng = RngState.derive(k, "retry-trial")
                prediction = complete(model, make_instance(typed="b"),
                                      config, rng)
                if prediction is not None:
                    assert prediction.word == "bb"
                    hits[runs] += 1
        assert hits[1] / trials == pytest.approx(0.1, abs=0.04)
        assert hits[5] / trials == pytest.approx(1 - 0.9 ** 5, abs=0.05)
        assert hits[5] > hits[1]

    def test_retry_monotonicity_under_common_random_numbers(self):
        model = scripted_completion_model()
        solved = {}
        for runs in (1, 3, 5):
            config = DecodeConfig(num_hypotheses=1, sampling_topk=2,
                                  max_runs=runs, max_decode_len=4)
            solved[runs] = {
                k for k in range(300)
                if complete(model, make_instance(typed="b"), config,
                            RngState.derive(k, "mono")) is not None
            }
        assert solved[1] <= solved[3] <= solved[5]

    def test_runs_used_reflects_the_successful_run(self):
        model = scripted_completion_model()
        config = DecodeConfig(num_hypotheses=1, sampling_topk=2, max_runs=5,
                              max_decode_len=4)
        seen = set()
        for k in range(200):
            prediction = complete(model, make_instance(typed="b"), config,
                                  RngState.derive(k, "runs-used"))
            if prediction is not None:
                assert 1 <= prediction.runs_used <= 5
                seen.add(prediction.runs_used)
        assert len(seen) > 1  # retries do fire on some seeds

    def test_constrained_hypothesis_takes_priority(self):
        pieces = ["<unk>", "</s>", "▁", "▁cat", "▁can", "▁The"]
        vocab = SubwordVocab(pieces)
        table = {
            (5,): [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],   # after "The": "cat"
            (5, 3): [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            (): [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],      # unconstrained: "can"
            (4,): [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        }
        model = ScriptedModel(table, default=[0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                              eos_id=1, text_vocab=vocab)
        config = DecodeConfig(num_hypotheses=1, sampling_topk=0, max_decode_len=4)
        instance = make_instance(typed="ca", left_context="The")
        prediction = complete(model, instance, config, RngState(0))
        assert prediction.word == "cat"
        assert prediction.source_hypothesis.constrained

    def test_temperature_range_collapses_to_fixed_when_equal(self, toy_model):
        instance = make_instance(typed="b", left_context="Arbol")
        fixed = DecodeConfig(num_hypotheses=6, sampling_topk=10, max_runs=3,
                             temperature=1.1, max_decode_len=8)
        ranged = DecodeConfig(num_hypotheses=6, sampling_topk=10, max_runs=3,
                              temperature=1.1, temperature_max=1.1,
                              max_decode_len=8)
        for seed in range(10):
            a = complete(toy_model, instance, fixed, RngState.derive(seed, "t"))
            b = complete(toy_model, instance, ranged, RngState.derive(seed, "t"))
            if a is None:
                assert b is None
            else:
                assert (a.word, a.source_hypothesis.tokens, a.runs_used) == \
                    (b.word, b.source_hypothesis.tokens, b.runs_used)

    def test_temperature_range_draws_vary_per_run(self, toy_model):
        instance = make_instance(typed="x")
        ranged = DecodeConfig(num_hypotheses=4, sampling_topk=10, max_runs=5,
                              temperature=1.0, temperature_max=1.3,
                              max_decode_len=8)
        # Smoke: the ranged mode must run and stay within the contract.
        prediction = complete(toy_model, instance, ranged, RngState(3))
        if prediction is not None:
            assert prediction.word.startswith("x")

    def test_right_context_invariance_end_to_end(self, toy_model):
        config = DecodeConfig(num_hypotheses=8, sampling_topk=10, max_runs=2,
                              max_decode_len=8)
        for seed in range(15):
            base = make_instance(id=f"p{seed}", typed="a")
            with_right = make_instance(id=f"p{seed}", typed="a",
                                       right_context="gamon ipsum")
            rng_a = RngState.derive(seed, base.id)
            rng_b = RngState.derive(seed, with_right.id)
            a = complete(toy_model, base, config, rng_a)
            b = complete(toy_model, with_right, config, rng_b)
            assert (a is None) == (b is None)
            if a is not None:
                assert a.word == b.word and a.runs_used == b.runs_used
