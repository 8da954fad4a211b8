import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from synth import cooccurrence_corpus

from instcollab.embeddings import (
    EmbeddingTable,
    PhraseIndex,
    TrainParams,
    cosine,
    dump_embeddings,
    load_embeddings,
    phrase_vector,
    read_sentences,
    top_k_similar,
    train_skipgram,
)
from instcollab.exceptions import (
    DimensionMismatch,
    DuplicateToken,
    EmptyVocabulary,
    HeaderMismatch,
    NoVector,
)

PETS = "2 3\ncat 1 0 0\ndog 0 1 0\n"


def test_load_small_table():
    t = load_embeddings(PETS)
    assert len(t) == 2 and t.dimension == 3
    assert list(t.tokens) == ["cat", "dog"]
    np.testing.assert_array_equal(t["dog"], [0, 1, 0])


def test_tokens_lowercased_on_load():
    t = load_embeddings("1 2\nCAT 1 2\n")
    assert "cat" in t and "CAT" not in t


@pytest.mark.parametrize(
    "text,exc",
    [
        ("2 3\ncat 1 0\ndog 0 1 0\n", DimensionMismatch),
        ("two 3\n", HeaderMismatch),
        ("3 3\ncat 1 0 0\n", HeaderMismatch),
        ("2 2\ncat 1 0\nCat 0 1\n", DuplicateToken),
    ],
)
def test_load_errors(text, exc):
    with pytest.raises(exc):
        load_embeddings(text)


def test_dimension_mismatch_line_number():
    with pytest.raises(DimensionMismatch) as err:
        load_embeddings("2 3\ncat 1 0 0\ndog 0 1\n")
    assert err.value.line_no == 3


def test_dump_round_trip_is_byte_identical():
    text = "3 2\na 0.500000 -1.250000\nb 0.000000 2.000000\nc 3.141593 1.000000\n"
    assert dump_embeddings(load_embeddings(text)) == text


def test_matrix_is_read_only():
    t = load_embeddings(PETS)
    with pytest.raises(ValueError):
        t.matrix[0, 0] = 5


def test_phrase_vector():
    t = load_embeddings(PETS)
    np.testing.assert_array_equal(phrase_vector(t, "cat"), t["cat"])
    np.testing.assert_allclose(phrase_vector(t, "cat dog"), (t["cat"] + t["dog"]) / 2)
    np.testing.assert_allclose(phrase_vector(t, "cat zebra"), t["cat"])
    assert phrase_vector(t, "zebra okapi") is None


def test_top_k_exact_match_first():
    t = EmbeddingTable(["a", "b", "c", "q"], np.array([[1, 0], [0, 1], [1, 1], [1, 1]], dtype=float))
    got = top_k_similar(t, "q", 3, ["a", "b", "c"])
    assert got[0][0] == "c" and got[0][1] == pytest.approx(1.0)
    # a and b tie at 1/sqrt(2); lexicographic order decides
    assert [n for n, _ in got] == ["c", "a", "b"]


def test_top_k_larger_than_candidates_and_self_excluded():
    t = load_embeddings(PETS)
    got = top_k_similar(t, "cat", 10, ["cat", "dog", "unicorn"])
    assert [n for n, _ in got] == ["dog"]


def test_top_k_matches_brute_force():
    t = EmbeddingTable(["x", "y", "z", "w"], np.array([[1, 0, 0], [0, 1, 0], [1, 1, 0], [2, 0.1, 0]]))
    cands = ["y", "z", "w"]
    brute = sorted(((c, cosine(t["x"], t[c])) for c in cands), key=lambda p: (-p[1], p[0]))
    got = top_k_similar(t, "x", 3, cands)
    assert [n for n, _ in got] == [n for n, _ in brute]
    np.testing.assert_allclose([s for _, s in got], [s for _, s in brute])


def test_top_k_no_vector():
    with pytest.raises(NoVector):
        top_k_similar(load_embeddings(PETS), "zebra", 2, ["cat"])


def test_phrase_index_skips_unknown():
    idx = PhraseIndex(load_embeddings(PETS), ["cat", "zebra", "dog cat"])
    assert "cat" in idx and "dog cat" in idx and "zebra" not in idx


vectors = arrays(np.float64, st.integers(1, 6).map(lambda d: (5, d)), elements=st.floats(-10, 10))


@given(vectors)
def test_self_cosine_is_one(mat):
    t = EmbeddingTable([f"t{k}" for k in range(5)], mat)
    for tok in t.tokens:
        if np.linalg.norm(t[tok]) > 1e-6:
            assert cosine(t[tok], t[tok]) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=50)
@given(vectors, st.integers(1, 5))
def test_top_k_sorted_and_deterministic(mat, k):
    names = [f"t{k}" for k in range(5)]
    t = EmbeddingTable(names, mat)
    first = top_k_similar(t, "t0", k, names) if np.linalg.norm(mat[0]) else []
    again = top_k_similar(t, "t0", k, names) if np.linalg.norm(mat[0]) else []
    assert first == again
    sims = [s for _, s in first]
    assert all(a >= b - 1e-12 for a, b in itertools.pairwise(sims))


def test_read_sentences():
    import io

    assert list(read_sentences(io.StringIO("Alpha beta\n\n  gamma \n"))) == [["alpha", "beta"], ["gamma"]]


# ----------------------------------------------------------------- training

SMALL = {"dimension": 16, "window": 2, "batch_size": 512}


def test_same_seed_same_table():
    corpus = cooccurrence_corpus(600, seed=1)
    a = train_skipgram(corpus, TrainParams(seed=5, **SMALL))
    b = train_skipgram(corpus, TrainParams(seed=5, **SMALL))
    c = train_skipgram(corpus, TrainParams(seed=6, **SMALL))
    assert a == b
    assert not np.array_equal(a.matrix, c.matrix)


def test_vocabulary_and_frequencies():
    table = train_skipgram([["a", "b", "a"], ["b", "c"]], TrainParams(dimension=4, min_count=2, epochs=1))
    assert sorted(table.tokens) == ["a", "b"]
    assert table.token_frequency == {"a": 2, "b": 2}


def test_min_count_too_high():
    with pytest.raises(EmptyVocabulary):
        train_skipgram([["a", "b"]], TrainParams(min_count=5))


def test_loss_decreases_within_noise_band():
    corpus = cooccurrence_corpus(2000, seed=2)
    table = train_skipgram(corpus, TrainParams(seed=0, **SMALL))
    losses = table.loss_history
    assert len(losses) == 5
    for prev, cur in itertools.pairwise(losses):
        assert cur <= prev * 1.05
    assert losses[-1] < losses[0]


def test_cooccurring_tokens_end_up_closer():
    corpus = cooccurrence_corpus(2000, seed=3)
    t = train_skipgram(corpus, TrainParams(seed=1, **SMALL))
    assert cosine(t["alpha"], t["beta"]) > cosine(t["alpha"], t["gamma"])


@pytest.mark.parametrize(
    "kwargs", [{"dimension": 0}, {"window": 0}, {"epochs": 0}, {"learning_rate": 0}, {"negative_samples": -1}]
)
def test_train_params_validation(kwargs):
    with pytest.raises(ValueError):
        TrainParams(**kwargs)
