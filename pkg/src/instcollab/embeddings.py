"""Word vectors: loading, skip-gram training and phrase similarity queries."""

from __future__ import annotations

import io
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .exceptions import (
    DimensionMismatch,
    DuplicateToken,
    EmptyVocabulary,
    HeaderMismatch,
    NoVector,
)

# cosines are compared after rounding so that values equal up to BLAS noise tie
_COS_DECIMALS = 12


class EmbeddingTable:
    """Immutable token -> vector map.

    Parameters
    ----------
    tokens : sequence of str
        Lowercase, non-empty, unique.
    matrix : array of shape (len(tokens), dimension)
    token_frequency : mapping, optional
        Training-corpus counts; defaults to 1 per token.
    loss_history : sequence of float, optional
        Mean per-pair loss of each training epoch (empty for loaded tables).
    """

    def __init__(self, tokens, matrix, token_frequency=None, loss_history=()):
        tokens = tuple(tokens)
        matrix = np.array(matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise ValueError("matrix must have one row per token")
        if matrix.shape[1] < 1:
            raise ValueError("dimension must be positive")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("non-finite vector component")
        index = {}
        for i, tok in enumerate(tokens):
            if not tok or tok != tok.lower():
                raise ValueError(f"token {tok!r} must be non-empty lowercase")
            if tok in index:
                raise DuplicateToken(tok)
            index[tok] = i
        matrix.setflags(write=False)
        self._tokens = tokens
        self._index = index
        self._matrix = matrix
        if token_frequency is None:
            token_frequency = dict.fromkeys(tokens, 1)
        self._freq = {t: int(token_frequency.get(t, 0)) for t in tokens}
        self.loss_history = tuple(float(x) for x in loss_history)

    @property
    def dimension(self) -> int:
        return self._matrix.shape[1]

    @property
    def tokens(self):
        return self._tokens

    @property
    def matrix(self):
        return self._matrix

    @property
    def vectors(self):
        return {t: self._matrix[i] for t, i in self._index.items()}

    @property
    def token_frequency(self):
        return dict(self._freq)

    def __len__(self):
        return len(self._tokens)

    def __contains__(self, token):
        return token in self._index

    def __getitem__(self, token):
        return self._matrix[self._index[token]]

    def __eq__(self, other):
        if not isinstance(other, EmbeddingTable):
            return NotImplemented
        return (
            self._tokens == other._tokens
            and np.array_equal(self._matrix, other._matrix)
            and self._freq == other._freq
        )

    def __repr__(self):
        return f"EmbeddingTable(n_tokens={len(self)}, dimension={self.dimension})"


@dataclass(frozen=True)
class TrainParams:
    dimension: int = 100
    window: int = 5
    negative_samples: int = 5
    epochs: int = 5
    min_count: int = 2
    learning_rate: float = 0.025
    seed: int = 0
    batch_size: int = 512

    def __post_init__(self):
        for name in ("dimension", "window", "negative_samples", "epochs",
                     "min_count", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


# ---------------------------------------------------------------- text format

def load_embeddings(
    text: str | TextIO, token_frequency: Mapping[str, int] | None = None
) -> EmbeddingTable:
    """Read the ``<vocab_size> <dimension>`` word-vector text format.

    Tokens are lowercased on read.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    head = stream.readline().split()
    try:
        vocab_size, dim = (int(x) for x in head)
    except ValueError:
        raise HeaderMismatch(f"bad header {' '.join(head)!r}") from None
    if vocab_size < 0 or dim < 1:
        raise HeaderMismatch(f"bad header {' '.join(head)!r}")
    tokens, rows = [], []
    seen = set()
    for line_no, line in enumerate(stream, start=2):
        parts = line.rstrip("\r\n").split(" ")
        if not line.strip():
            continue
        token = parts[0].lower()
        values = [p for p in parts[1:] if p]
        if len(values) != dim:
            raise DimensionMismatch(line_no, dim, len(values))
        if token in seen:
            raise DuplicateToken(token)
        seen.add(token)
        try:
            rows.append([float(v) for v in values])
        except ValueError:
            raise DimensionMismatch(line_no, dim, len(values)) from None
        tokens.append(token)
    if len(tokens) != vocab_size:
        raise HeaderMismatch(f"header announces {vocab_size} tokens, found {len(tokens)}")
    matrix = np.array(rows, dtype=np.float64).reshape(len(tokens), dim)
    return EmbeddingTable(tokens, matrix, token_frequency)


def dump_embeddings(table: EmbeddingTable, stream: TextIO | None = None):
    out = stream if stream is not None else io.StringIO()
    out.write(f"{len(table)} {table.dimension}\n")
    for tok, row in zip(table.tokens, table.matrix):
        out.write(tok + " " + " ".join(f"{v:.6f}" for v in row) + "\n")
    if stream is None:
        return out.getvalue()


def read_sentences(stream: TextIO):
    """Yield lowercase whitespace-tokenized sentences, one per non-blank line."""
    for line in stream:
        toks = line.lower().split()
        if toks:
            yield toks


# ------------------------------------------------------------------- training

def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _context_pairs(sentences: Sequence[np.ndarray], window: int):
    centers, contexts = [], []
    for s in sentences:
        for d in range(1, min(window, len(s) - 1) + 1):
            centers.append(s[:-d])
            contexts.append(s[d:])
            centers.append(s[d:])
            contexts.append(s[:-d])
    if not centers:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


def _scatter_mean(target, rows, grads, lr):
    # rows repeat inside a batch; scaling by sqrt(count) keeps frequent
    # tokens from taking one oversized step per batch
    order = np.argsort(rows, kind="stable")
    rows = rows[order]
    starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    acc = np.add.reduceat(grads[order], starts, axis=0)
    counts = np.diff(np.r_[starts, len(rows)]).astype(np.float64)
    target[rows[starts]] -= lr * acc / np.sqrt(counts)[:, None]


def train_skipgram(
    corpus: Iterable[Sequence[str]], params: TrainParams | None = None
) -> EmbeddingTable:
    """Train skip-gram vectors with negative sampling.

    Parameters
    ----------
    corpus : iterable of token sequences
        One tokenized sentence per item; tokens are lowercased.
    params : TrainParams, optional
        Defaults to ``TrainParams()``.

    Returns
    -------
    EmbeddingTable
        Input vectors of every token seen at least ``min_count`` times,
        with corpus counts as ``token_frequency`` and the per-epoch mean
        loss in ``loss_history``.

    Notes
    -----
    Updates are applied in minibatches of (center, context) pairs. Each
    epoch visits all in-window pairs in an order drawn from a Philox
    generator keyed on the seed with its counter set from the epoch, so a
    given seed reproduces the table bit for bit. Negatives follow the unigram
    distribution raised to 0.75.
    """
    params = params or TrainParams()
    sentences = [[t.lower() for t in s] for s in corpus]
    counts = Counter(t for s in sentences for t in s)
    if not counts:
        raise EmptyVocabulary("empty corpus")
    vocab = sorted(
        (t for t, c in counts.items() if c >= params.min_count),
        key=lambda t: (-counts[t], t),
    )
    if not vocab:
        raise EmptyVocabulary(f"no token occurs at least {params.min_count} times")
    index = {t: i for i, t in enumerate(vocab)}
    encoded = [
        np.fromiter((index[t] for t in s if t in index), dtype=np.int64)
        for s in sentences
    ]
    centers, contexts = _context_pairs(encoded, params.window)
    n_vocab, dim, n_neg = len(vocab), params.dimension, params.negative_samples

    init = np.random.Generator(np.random.Philox(key=params.seed))
    w_in = (init.random((n_vocab, dim)) - 0.5) / dim
    w_out = np.zeros((n_vocab, dim))

    freq = np.array([counts[t] for t in vocab], dtype=np.float64) ** 0.75
    cum = np.cumsum(freq / freq.sum())
    cum[-1] = 1.0

    n_pairs = len(centers)
    bs = params.batch_size
    n_batches = math.ceil(n_pairs / bs) if n_pairs else 0
    total_steps = max(1, n_batches * params.epochs)
    lr0 = params.learning_rate
    losses = []
    step = 0
    for epoch in range(params.epochs):
        order_rng = np.random.Generator(
            np.random.Philox(key=params.seed, counter=[epoch, 0, 0, 1])
        )
        order = order_rng.permutation(n_pairs)
        negatives = np.searchsorted(
            cum, order_rng.random((n_pairs, n_neg)), side="right"
        )
        epoch_loss = 0.0
        for b in range(n_batches):
            sel = order[b * bs:(b + 1) * bs]
            c, o = centers[sel], contexts[sel]
            neg = negatives[b * bs:(b + 1) * bs]
            lr = max(lr0 * (1.0 - step / total_steps), lr0 * 1e-4)
            step += 1

            vc = w_in[c]
            uo = w_out[o]
            un = w_out[neg]
            sp = _sigmoid(np.einsum("bd,bd->b", vc, uo))
            sn = _sigmoid(np.einsum("bkd,bd->bk", un, vc))
            epoch_loss -= np.log(np.maximum(sp, 1e-12)).sum()
            epoch_loss -= np.log(np.maximum(1.0 - sn, 1e-12)).sum()

            g_pos = sp - 1.0
            grad_c = g_pos[:, None] * uo + np.einsum("bk,bkd->bd", sn, un)
            grad_o = g_pos[:, None] * vc
            grad_n = sn[:, :, None] * vc[:, None, :]
            _scatter_mean(w_in, c, grad_c, lr)
            _scatter_mean(
                w_out,
                np.concatenate([o, neg.ravel()]),
                np.concatenate([grad_o, grad_n.reshape(-1, dim)]),
                lr,
            )
        losses.append(epoch_loss / n_pairs if n_pairs else 0.0)
    return EmbeddingTable(
        vocab, w_in, {t: counts[t] for t in vocab}, loss_history=losses
    )


# ----------------------------------------------------------------- similarity

def phrase_vector(table: EmbeddingTable, phrase: str):
    """Mean vector of the phrase's in-vocabulary whitespace tokens, or None."""
    rows = [table[t] for t in phrase.lower().split() if t in table]
    if not rows:
        return None
    return np.mean(rows, axis=0)


def cosine(a, b) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class PhraseIndex:
    """Unit-normalized phrase vectors for repeated neighbour queries.

    Phrases without a vector, or whose mean vector is zero, are not indexed.
    """

    def __init__(self, table: EmbeddingTable, phrases: Iterable[str]):
        names, rows = [], []
        for p in sorted(set(phrases)):
            v = phrase_vector(table, p)
            if v is None:
                continue
            n = np.linalg.norm(v)
            if n == 0:
                continue
            names.append(p)
            rows.append(v / n)
        self.names = names
        self.position = {p: i for i, p in enumerate(names)}
        self.units = (
            np.vstack(rows) if rows else np.empty((0, table.dimension))
        )

    def __contains__(self, phrase):
        return phrase in self.position

    def neighbours(self, query_units: np.ndarray, k: int, exclude=()):
        """Top-*k* (name, cosine) lists for each row of *query_units*.

        Ranking is by cosine descending then name; *exclude* gives, per
        query row, a name to leave out (or None).
        """
        sims = query_units @ self.units.T
        keys = np.round(sims, _COS_DECIMALS)
        out = []
        for row in range(sims.shape[0]):
            skip = exclude[row] if row < len(exclude) else None
            key = keys[row].copy()
            if skip is not None and skip in self.position:
                key[self.position[skip]] = -np.inf
            n_valid = int(np.sum(key > -np.inf))
            kk = min(k, n_valid)
            if kk == 0:
                out.append([])
                continue
            if kk < len(key):
                kth = np.partition(key, len(key) - kk)[len(key) - kk]
                cand = np.flatnonzero(key >= kth)
            else:
                cand = np.flatnonzero(key > -np.inf)
            cand = sorted(cand, key=lambda j: (-key[j], self.names[j]))[:kk]
            out.append([(self.names[j], float(sims[row, j])) for j in cand])
        return out


def top_k_similar(
    table: EmbeddingTable, phrase: str, k: int, candidates: Iterable[str]
) -> list:
    """Rank *candidates* by cosine similarity to *phrase*.

    Returns at most *k* ``(candidate, cosine)`` pairs, highest cosine
    first with ties broken lexicographically. The phrase itself and
    candidates without a vector are skipped.

    Raises
    ------
    NoVector
        No token of *phrase* is in the vocabulary.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    q = phrase_vector(table, phrase)
    if q is None:
        raise NoVector(phrase)
    n = np.linalg.norm(q)
    if n == 0:
        return []
    index = PhraseIndex(table, candidates)
    return index.neighbours((q / n)[None, :], k, exclude=[phrase])[0]
