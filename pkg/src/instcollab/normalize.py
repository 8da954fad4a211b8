"""Two-layer keyword normalization.

Layer one replaces each keyword with the most frequent member of its
embedding-similarity group; layer two folds plurals onto singulars that
differ only by a trailing ``s``.
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Callable, Iterable, Mapping
from typing import TextIO

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_datasets, check_is_fitted
from .corpus import InstitutionDataset, PublicationRecord
from .embeddings import EmbeddingTable, PhraseIndex

IDENTITY = "identity"
SIMILARITY = "similarity"
PLURAL = "plural"

_NUMERAL = re.compile(r"[\d\s.,:/+\-()%]+")


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def is_artifact(keyword: str) -> bool:
    """Numerals and single characters are never rewritten or used as targets."""
    return len(keyword) <= 1 or bool(_NUMERAL.fullmatch(keyword))


class CanonicalMap(Mapping):
    """Immutable raw -> canonical keyword map with per-entry provenance.

    Lookups of keywords outside the map return the keyword itself.
    """

    def __init__(self, mapping, provenance=None):
        self._map = dict(mapping)
        provenance = dict(provenance or {})
        self._prov = {
            k: provenance.get(k, IDENTITY if v == k else SIMILARITY)
            for k, v in self._map.items()
        }

    @classmethod
    def identity(cls, keywords):
        return cls({k: k for k in keywords})

    def __getitem__(self, key):
        return self._map.get(key, key)

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __contains__(self, key):
        return key in self._map

    def __eq__(self, other):
        if isinstance(other, CanonicalMap):
            return self._map == other._map and self._prov == other._prov
        return NotImplemented

    def __repr__(self):
        changed = sum(k != v for k, v in self._map.items())
        return f"CanonicalMap({len(self)} keywords, {changed} rewritten)"

    def provenance(self, key):
        return self._prov.get(key, IDENTITY)

    def image(self):
        return set(self._map.values())

    def is_idempotent(self):
        return all(self[v] == v for v in self._map.values())

    def write_tsv(self, stream: TextIO):
        """Audit dump: ``raw<TAB>canonical`` rows sorted by raw keyword."""
        stream.writelines(f"{raw}\t{self._map[raw]}\n" for raw in sorted(self._map))


def _compress(step: Callable[[str], str], keywords, rank_key):
    """Follow *step* from every keyword to a fixed point.

    Cycles resolve to their member with the smallest *rank_key*.
    """
    resolved = {}
    for start in keywords:
        if start in resolved:
            continue
        path, seen = [], {}
        cur = start
        while cur not in resolved:
            if cur in seen:
                cycle = path[seen[cur]:]
                rep = min(cycle, key=rank_key)
                for kw in cycle:
                    resolved[kw] = rep
                break
            seen[cur] = len(path)
            path.append(cur)
            nxt = step(cur)
            if nxt == cur:
                resolved[cur] = cur
                break
            cur = nxt
        for kw in path:
            if kw not in resolved:
                resolved[kw] = resolved[cur]
    return resolved


def _as_counts(keyword_universe) -> Counter:
    if isinstance(keyword_universe, Mapping):
        return Counter(dict(keyword_universe))
    return Counter(keyword_universe)


def _frequency_rank(counts):
    # most frequent first, then the shorter (more general) term, then lexicographic
    return lambda kw: (-counts.get(kw, 0), len(kw), kw)


def canonicalize_by_similarity(
    keyword_universe: Mapping | Iterable[str],
    table: EmbeddingTable | None,
    k: int = 5,
) -> CanonicalMap:
    """Map each keyword to the most frequent member of its similarity group.

    Parameters
    ----------
    keyword_universe : mapping keyword -> frequency, or iterable of keywords
        An iterable is counted as a multiset.
    table : EmbeddingTable or None
        None yields the identity map.
    k : int, default 5
        Neighbours per keyword. The group is the keyword plus its *k*
        nearest keywords of the universe by phrase cosine.

    Returns
    -------
    CanonicalMap
        Path-compressed, so canonical keywords map to themselves.
        Keywords without a vector, numerals and single characters map to
        themselves.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = _as_counts(keyword_universe)
    rank = _frequency_rank(counts)
    raw = {kw: kw for kw in counts}
    if table is not None and counts:
        index = PhraseIndex(table, (kw for kw in counts if not is_artifact(kw)))
        names = index.names
        chunk = 256
        for lo in range(0, len(names), chunk):
            batch = names[lo:lo + chunk]
            groups = index.neighbours(index.units[lo:lo + chunk], k, exclude=batch)
            for kw, neigh in zip(batch, groups):
                raw[kw] = min([kw] + [n for n, _ in neigh], key=rank)
    # each step moves strictly up the frequency order, so chains end
    mapping = _compress(raw.__getitem__, sorted(raw), rank)
    return CanonicalMap(
        mapping, {kw: SIMILARITY if v != kw else IDENTITY for kw, v in mapping.items()}
    )


def fold_plurals(keyword_universe: Iterable[str]) -> CanonicalMap:
    """Map ``p`` to ``q`` when ``p == q + "s"`` and both are in the universe.

    Such pairs are exactly the distance-1 pairs whose longer member ends
    in ``s`` and becomes the other once that ``s`` is stripped. Repeated
    folds ("xss" -> "xs" -> "x") are compressed.
    """
    universe = set(keyword_universe)
    raw = {}
    for p in universe:
        q = p[:-1]
        if (
            p.endswith("s")
            and q in universe
            and not is_artifact(p)
            and not is_artifact(q)
        ):
            raw[p] = q
        else:
            raw[p] = p
    mapping = _compress(raw.__getitem__, sorted(universe), lambda kw: (len(kw), kw))
    return CanonicalMap(
        mapping, {kw: PLURAL if v != kw else IDENTITY for kw, v in mapping.items()}
    )


def compose_maps(m1: CanonicalMap, m2: CanonicalMap, counts=None) -> CanonicalMap:
    """Path-compressed ``m2 . m1`` over the union of both key sets.

    The result is idempotent: every canonical keyword maps to itself.
    Provenance records the last layer that changed the keyword.
    """
    counts = counts or {}
    keys = sorted(set(m1) | set(m2))
    mapping = _compress(lambda kw: m2[m1[kw]], keys, _frequency_rank(counts))
    prov = {}
    for kw in keys:
        target = mapping[kw]
        if target == kw:
            prov[kw] = IDENTITY
        elif m2.provenance(m1[kw]) == PLURAL or m2.provenance(kw) == PLURAL:
            prov[kw] = PLURAL
        else:
            prov[kw] = SIMILARITY
    return CanonicalMap(mapping, prov)


def _rewrite(dataset: InstitutionDataset, lookup) -> InstitutionDataset:
    records = [
        PublicationRecord(
            r.uid,
            list(dict.fromkeys(lookup(k) for k in r.author_keywords)),
            r.citation_count,
            r.year,
        )
        for r in dataset.records
    ]
    return InstitutionDataset(dataset.institution_id, records)


def normalize_dataset(
    dataset: InstitutionDataset,
    m1: CanonicalMap,
    m2: CanonicalMap | None = None,
) -> InstitutionDataset:
    """Replace every keyword by its canonical form.

    With both maps the keyword becomes ``m2[m1[k]]`` followed to its fixed
    point; a single (already composed) map is applied directly. Repeats
    inside a record collapse; records left without keywords are kept.
    """
    if m2 is not None:
        m1 = compose_maps(m1, m2)
    return _rewrite(dataset, m1.__getitem__)


def keyword_counts(datasets: Iterable[InstitutionDataset]) -> Counter:
    """Number of distinct works carrying each keyword, across all institutions.

    A work listed by several co-affiliated institutions counts once.
    """
    works = {}
    for ds in datasets:
        for r in ds.records:
            for kw in r.author_keywords:
                works.setdefault(kw, set()).add(r.uid)
    return Counter({kw: len(uids) for kw, uids in works.items()})


class KeywordNormalizer(TransformerMixin, BaseEstimator):
    """Learn a canonical keyword map from a corpus and rewrite datasets.

    Parameters
    ----------
    embeddings : EmbeddingTable, optional
        Word vectors for the similarity layer. Without them only plural
        folding is applied.
    k : int, default 5
        Size of each keyword's similarity neighbourhood.

    Attributes
    ----------
    keyword_counts_ : Counter
    similarity_map_ : CanonicalMap
    plural_map_ : CanonicalMap
    canonical_map_ : CanonicalMap
        Composition of both layers, idempotent.

    Examples
    --------
    >>> from instcollab.corpus import InstitutionDataset, PublicationRecord
    >>> ds = InstitutionDataset("x", [PublicationRecord("w1", ["algorithms", "algorithm"], 3)])
    >>> KeywordNormalizer().fit_transform([ds])[0].records[0].author_keywords
    ('algorithm',)
    """

    def __init__(self, embeddings=None, k=5):
        self.embeddings = embeddings
        self.k = k

    def fit(self, X, y=None):
        X = check_datasets(X)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        counts = keyword_counts(X)
        self.keyword_counts_ = counts
        self.similarity_map_ = canonicalize_by_similarity(counts, self.embeddings, self.k)
        self.plural_map_ = fold_plurals(counts)
        self.canonical_map_ = compose_maps(self.similarity_map_, self.plural_map_, counts)
        return self

    def transform(self, X):
        check_is_fitted(self, "canonical_map_")
        X = check_datasets(X)
        return [normalize_dataset(ds, self.canonical_map_) for ds in X]
