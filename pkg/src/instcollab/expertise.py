"""Ranked thematic profiles and the x / x(g) expertise indices."""

from __future__ import annotations

import io
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple, TextIO

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_datasets
from .network import ThematicProfile, thematic_profile


class ProfileEntry(NamedTuple):
    keyword: str
    strength: float
    crr: float
    ccsrr: float


@dataclass(frozen=True)
class RankedProfile:
    """An institution's thematic areas by descending strength.

    Entry ``r`` (1-based) carries ``crr = strength / r`` and
    ``ccsrr = cumulative strength / r**2``. Areas of zero strength sit at
    the end with both ratios 0: they take no part in either index.
    """

    institution_id: str
    entries: tuple
    x: int
    xg: int

    def __len__(self):
        return len(self.entries)

    @property
    def keywords(self):
        return [e.keyword for e in self.entries]

    @property
    def strengths(self):
        return [e.strength for e in self.entries]

    def as_profile(self) -> ThematicProfile:
        return ThematicProfile(self.institution_id, {e.keyword: e.strength for e in self.entries})


def _ratios(strengths):
    crr, ccsrr = [], []
    total = 0
    for r, s in enumerate(strengths, start=1):
        if s > 0:
            total += s
            crr.append(s / r)
            ccsrr.append(total / (r * r))
        else:
            crr.append(0.0)
            ccsrr.append(0.0)
    return crr, ccsrr


def _last_rank_at_least_one(ratios):
    last = 0
    for r, v in enumerate(ratios, start=1):
        if v >= 1:
            last = r
    return last


def _sorted_strengths(profile):
    if isinstance(profile, RankedProfile):
        return profile.strengths
    return sorted(profile, reverse=True)


def x_index(profile: RankedProfile | Sequence[float]) -> int:
    """Largest rank r whose strength is at least r (0 if none).

    Accepts a RankedProfile or any collection of strengths.
    """
    crr, _ = _ratios(_sorted_strengths(profile))
    return _last_rank_at_least_one(crr)


def xg_index(profile: RankedProfile | Sequence[float]) -> int:
    """Largest rank r whose cumulative strength is at least r**2 (0 if none).

    Ranks never exceed the number of areas with positive strength.
    """
    _, ccsrr = _ratios(_sorted_strengths(profile))
    return _last_rank_at_least_one(ccsrr)


def rank_profile(profile: ThematicProfile) -> RankedProfile:
    """Sort areas by strength (ties by keyword) and compute both indices."""
    items = sorted(profile.strength.items(), key=lambda kv: (-kv[1], kv[0]))
    strengths = [s for _, s in items]
    crr, ccsrr = _ratios(strengths)
    entries = tuple(
        ProfileEntry(kw, s, c, g) for (kw, s), c, g in zip(items, crr, ccsrr)
    )
    return RankedProfile(
        profile.institution_id,
        entries,
        _last_rank_at_least_one(crr),
        _last_rank_at_least_one(ccsrr),
    )


def competency_split(rp: RankedProfile):
    """Core areas (ranks 1..x) and potential core areas (ranks x+1..x(g)).

    Both are returned as keyword lists in rank order.
    """
    core = [e.keyword for e in rp.entries[: rp.x]]
    potential = [e.keyword for e in rp.entries[rp.x: rp.xg]]
    return core, potential


def _fmt_number(v):
    if isinstance(v, int) or float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def write_profile_tsv(rp: RankedProfile, stream: TextIO | None = None):
    """``rank keyword strength crr ccsrr`` rows, ratios to 4 decimals."""
    out = stream if stream is not None else io.StringIO()
    out.write("rank\tkeyword\tstrength\tcrr\tccsrr\n")
    for r, e in enumerate(rp.entries, start=1):
        out.write(f"{r}\t{e.keyword}\t{_fmt_number(e.strength)}\t{e.crr:.4f}\t{e.ccsrr:.4f}\n")
    if stream is None:
        return out.getvalue()


def read_profile_tsv(text: str | TextIO, institution_id: str) -> ThematicProfile:
    """Recover the strengths written by :func:`write_profile_tsv`."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    header = stream.readline().rstrip("\r\n").split("\t")
    if header[:3] != ["rank", "keyword", "strength"]:
        raise ValueError(f"not a profile file for {institution_id!r}")
    strength = {}
    for line in stream:
        line = line.rstrip("\r\n")
        if not line:
            continue
        _, kw, s = line.split("\t")[:3]
        strength[kw] = int(s) if s.lstrip("-").isdigit() else float(s)
    return ThematicProfile(institution_id, strength)


class ExpertiseProfiler(TransformerMixin, BaseEstimator):
    """Turn normalized institution datasets into ranked thematic profiles.

    Parameters
    ----------
    scores : mapping uid -> score, optional
        Per-work scores injected instead of citation counts (for example
        altmetric values). Works not listed keep their citation count.

    The transformer is stateless; ``fit`` only validates its input.
    """

    def __init__(self, scores=None):
        self.scores = scores

    def fit(self, X, y=None):
        check_datasets(X)
        return self

    def transform(self, X):
        X = check_datasets(X)
        return [rank_profile(thematic_profile(ds, self.scores)) for ds in X]

    def __sklearn_is_fitted__(self):
        return True
