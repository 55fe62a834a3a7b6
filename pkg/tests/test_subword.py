"""Character n-gram model: decomposition, composition, training, ranking."""

from __future__ import annotations

import random

import numpy as np
import pytest

from discoursekit.errors import ConfigurationError
from discoursekit.variants.subword import (
    SubwordParams,
    char_ngrams,
    load_subword_model,
    ngram_bucket,
    rank_similar_forms,
    save_subword_model,
    train_subword_model,
)


class TestNgrams:
    def test_slave_3_and_4_grams(self):
        grams = char_ngrams("slave", 3, 4)
        assert grams[:5] == ["<sl", "sla", "lav", "ave", "ve>"]
        assert grams[5:] == ["<sla", "slav", "lave", "ave>"]

    def test_short_token(self):
        assert char_ngrams("a", 3, 6) == ["<a>"]

    def test_range_capped_by_length(self):
        grams = char_ngrams("ab", 3, 10)
        assert grams == ["<ab", "ab>", "<ab>"]

    def test_bucket_is_pure_hash(self):
        assert ngram_bucket("<sl", 1 << 16) == ngram_bucket("<sl", 1 << 16)
        values = {ngram_bucket(g, 1 << 16) for g in char_ngrams("slave", 3, 6)}
        assert len(values) > 1


def params(**kw):
    defaults = dict(
        dim=12,
        min_n=3,
        max_n=4,
        epochs=3,
        window=2,
        negatives=3,
        lr=0.05,
        seed=5,
        min_count=1,
        bucket_count=4096,
    )
    defaults.update(kw)
    return SubwordParams(**defaults)


def repeated_sentence_corpus(n=6):
    return [["the", "slave", "market", "opened", "today"]] * n


class TestTraining:
    def test_vocabulary_from_repeated_sentence(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        assert set(model.tokens) == {"the", "slave", "market", "opened", "today"}

    def test_min_count_filters(self):
        corpus = repeated_sentence_corpus(4) + [["rare", "words", "appear", "once"]]
        model = train_subword_model(corpus, params(min_count=2))
        assert "rare" not in model.vocabulary
        assert "slave" in model.vocabulary

    def test_empty_after_filter_rejected(self):
        with pytest.raises(ConfigurationError):
            train_subword_model([["once"]], params(min_count=5))

    def test_seed_isolation(self):
        a = train_subword_model(repeated_sentence_corpus(), params(seed=1))
        b = train_subword_model(repeated_sentence_corpus(), params(seed=2))
        assert a.tokens == b.tokens
        assert not np.array_equal(a.token_vectors, b.token_vectors)

    def test_deterministic_for_seed(self):
        a = train_subword_model(repeated_sentence_corpus(), params(seed=9))
        b = train_subword_model(repeated_sentence_corpus(), params(seed=9))
        assert np.array_equal(a.token_vectors, b.token_vectors)
        assert np.array_equal(a.ngram_vectors, b.ngram_vectors)

    def test_all_vectors_finite(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        assert np.isfinite(model.token_vectors).all()
        assert np.isfinite(model.ngram_vectors).all()

    def test_composition_is_mean_of_parts(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        token = "slave"
        buckets = model.bucket_ids(token)
        manual = (
            model.ngram_vectors[buckets].sum(axis=0)
            + model.token_vectors[model.vocabulary[token]]
        ) / (len(buckets) + 1)
        assert np.allclose(model.compose(token), manual)

    def test_oov_composes_from_ngrams_only(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        vec = model.compose("slove")
        buckets = model.bucket_ids("slove")
        assert np.allclose(vec, model.ngram_vectors[buckets].mean(axis=0))

    def test_parallel_mode_produces_finite_vectors(self):
        corpus = repeated_sentence_corpus(20)
        model = train_subword_model(corpus, params(epochs=2), workers=3)
        assert np.isfinite(model.token_vectors).all()
        assert set(model.tokens) == {"the", "slave", "market", "opened", "today"}

    def test_bucket_contents_unaffected_by_other_contexts(self):
        # Bucketing is a pure hash of the n-gram string: the same token
        # maps to the same buckets in a completely different corpus.
        a = train_subword_model(repeated_sentence_corpus(), params())
        b = train_subword_model([["slave", "auction", "block"]] * 4, params())
        assert a.bucket_ids("slave") == b.bucket_ids("slave")


def variant_context_corpus(rng: random.Random, sentences=260):
    """"slove" substitutes for "slave" in otherwise identical contexts."""
    fillers = [f"town{i}" for i in range(90)]
    corpus = []
    for _ in range(sentences):
        if rng.random() < 0.5:
            target = "slave" if rng.random() < 0.6 else "slove"
            corpus.append(["market", target, "auction"])
        else:
            corpus.append([rng.choice(fillers) for _ in range(4)])
    return corpus


class TestRanking:
    def test_keyword_excluded(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        ranked = rank_similar_forms(model, "slave", 10)
        assert all(token != "slave" for token, _ in ranked)

    def test_k_zero_empty(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        assert rank_similar_forms(model, "slave", 0) == []

    def test_k_beyond_vocab_full(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        ranked = rank_similar_forms(model, "slave", 10_000)
        assert len(ranked) == len(model.tokens) - 1

    def test_descending_with_lexicographic_ties(self):
        model = train_subword_model(repeated_sentence_corpus(), params())
        ranked = rank_similar_forms(model, "slave", 100)
        for (ta, ca), (tb, cb) in zip(ranked, ranked[1:]):
            assert ca > cb or (ca == cb and ta < tb)

    def test_planted_variant_in_top_five_across_seeds(self):
        for seed in range(5):
            corpus = variant_context_corpus(random.Random(200 + seed))
            model = train_subword_model(
                corpus, params(seed=seed + 1, epochs=4, window=2)
            )
            assert len(model.tokens) >= 90
            top5 = [t for t, _ in rank_similar_forms(model, "slave", 5)]
            assert "slove" in top5, f"seed {seed}: {top5}"


class TestPersistence:
    def test_npz_roundtrip(self, tmp_path):
        model = train_subword_model(repeated_sentence_corpus(), params())
        path = tmp_path / "subword.npz"
        save_subword_model(model, path)
        back = load_subword_model(path)
        assert back.tokens == model.tokens
        assert back.counts == model.counts
        assert back.ngram_range == model.ngram_range
        assert np.array_equal(back.token_vectors, model.token_vectors)
        assert np.array_equal(back.ngram_vectors, model.ngram_vectors)
        ranked_a = rank_similar_forms(model, "slave", 3)
        ranked_b = rank_similar_forms(back, "slave", 3)
        assert ranked_a == ranked_b
