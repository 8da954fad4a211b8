"""Collaboration recommendations from the thematic area x institution matrices.

Strategy 1 pairs an institution, in one of its core areas, with other
core-competent institutions of comparable or greater strength. Strategy 2
serves a potential core area: every core-competent institution is a high
priority recommendation, and potential-competent institutions whose
CCSRR is at least the requester's are low priority ones.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_delta, check_is_fitted, check_profiles
from .exceptions import AreaNotCore, AreaNotPotential, UnknownInstitution
from .expertise import RankedProfile
from .matrices import TIMatrices, build_ti_matrices

STRATEGY1 = "strategy1"
HIGH_PRIORITY = "high_priority"
LOW_PRIORITY = "low_priority"

CSV_HEADER = ("institution", "strategy", "area", "kind", "recommended", "strength")


@dataclass(frozen=True)
class RecommendationRequest:
    institution_id: str
    strategy: int
    area: str
    delta: float = 0.75

    def __post_init__(self):
        if self.strategy not in (1, 2):
            raise ValueError(f"strategy must be 1 or 2, got {self.strategy!r}")
        check_delta(self.delta)


@dataclass(frozen=True)
class RecommendationSet:
    request: RecommendationRequest
    kind: str
    recommendations: tuple = ()

    def __len__(self):
        return len(self.recommendations)

    def __iter__(self):
        return iter(self.recommendations)

    @property
    def institutions(self):
        return [inst for inst, _ in self.recommendations]


def _ranked(M: TIMatrices, row: int, cols) -> tuple:
    """(institution, strength) pairs by strength descending, then id."""
    pairs = [(M.institutions[j], float(M.citation[row, j])) for j in cols]
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return tuple((inst, int(s) if s.is_integer() else s) for inst, s in pairs)


def _areas_where(M: TIMatrices, mask: np.ndarray, col: int) -> list:
    rows = np.flatnonzero(mask)
    return sorted((M.areas[r] for r in rows), key=lambda a: (-M.citation[M.area_row(a), col], a))


def strong_areas(i, M: TIMatrices) -> list:
    """Areas with CRR >= 1 for institution *i*, strongest first."""
    col = M.column(i)
    return _areas_where(M, M.crr[:, col] >= 1, col)


def potential_areas(i, M: TIMatrices) -> list:
    """Areas with CCSRR >= 1 that are not strong areas of *i*, strongest first."""
    col = M.column(i)
    mask = (M.ccsrr[:, col] >= 1) & ~(M.crr[:, col] >= 1)
    return _areas_where(M, mask, col)


def strategy1(i, t, M: TIMatrices, delta: float = 0.75) -> RecommendationSet:
    """Core-competent institutions in *t* with strength >= delta x that of *i*.

    The threshold comparison is exact: *delta* is read as the decimal it
    prints as, so 0.8 means 4/5.

    Raises
    ------
    UnknownInstitution
    AreaNotCore
        *t* is not a core area (CRR >= 1) of *i*.
    """
    request = RecommendationRequest(i, 1, t, delta)
    col = M.column(i)
    row = M.area_row(t)
    if row is None or not M.crr[row, col] >= 1:
        raise AreaNotCore(t, i)
    threshold = Fraction(str(delta)) * Fraction(float(M.citation[row, col]))
    strong = np.flatnonzero(M.crr[row] >= 1)
    chosen = [
        j for j in strong
        if j != col and Fraction(float(M.citation[row, j])) >= threshold
    ]
    return RecommendationSet(request, STRATEGY1, _ranked(M, row, chosen))


def strategy2(i, t, M: TIMatrices):
    """High and low priority recommendations for a potential core area.

    Returns
    -------
    (high, low) : tuple of RecommendationSet
        *high* holds every institution with CRR >= 1 in *t*; *low* those
        with CCSRR >= 1 but CRR < 1 whose CCSRR is at least that of *i*.

    Raises
    ------
    UnknownInstitution
    AreaNotPotential
    """
    request = RecommendationRequest(i, 2, t)
    col = M.column(i)
    row = M.area_row(t)
    if row is None or not (M.ccsrr[row, col] >= 1 and not M.crr[row, col] >= 1):
        raise AreaNotPotential(t, i)
    in_y = M.crr[row] >= 1
    in_z = (M.ccsrr[row] >= 1) & ~in_y
    high = [j for j in np.flatnonzero(in_y) if j != col]
    own = M.ccsrr[row, col]
    low = [j for j in np.flatnonzero(in_z) if j != col and M.ccsrr[row, j] >= own]
    return (
        RecommendationSet(request, HIGH_PRIORITY, _ranked(M, row, high)),
        RecommendationSet(request, LOW_PRIORITY, _ranked(M, row, low)),
    )


def recommend_all(i, M: TIMatrices, delta: float = 0.75) -> dict:
    """Run strategy 1 on every core area and strategy 2 on every potential area.

    Returns an ordered ``{area: (RecommendationSet, ...)}`` map: core
    areas first, then potential areas, each in profile rank order.
    Strategy-1 entries hold one set, strategy-2 entries ``(high, low)``.
    """
    check_delta(delta)
    out = {}
    for t in strong_areas(i, M):
        out[t] = (strategy1(i, t, M, delta),)
    for t in potential_areas(i, M):
        out[t] = strategy2(i, t, M)
    return out


def iter_rows(results: dict):
    """Flatten ``{institution: recommend_all(...)}`` into CSV rows."""
    for inst, per_area in results.items():
        for area, sets in per_area.items():
            for rs in sets:
                for rec, strength in rs.recommendations:
                    yield (inst, rs.request.strategy, area, rs.kind, rec, strength)


def write_recommendations_csv(results: dict, stream: TextIO | None = None):
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in iter_rows(results):
        writer.writerow(row)
    if stream is None:
        return out.getvalue()


def read_recommendations_csv(text: str | TextIO) -> list:
    """Rows of a recommendations CSV as dicts (strategy as int, strength as number)."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError("unexpected recommendations CSV header")
    rows = []
    for row in reader:
        row["strategy"] = int(row["strategy"])
        s = row["strength"]
        row["strength"] = int(s) if s.isdigit() else float(s)
        rows.append(row)
    return rows


class CollaborationRecommender(BaseEstimator):
    """Fit the T-I matrices on ranked profiles and retrieve recommendations.

    Parameters
    ----------
    delta : float, default 0.75
        Strategy-1 strength threshold, in [0.5, 1].
    eliminate_zero_rows : bool, default True

    Attributes
    ----------
    matrices_ : TIMatrices
    institutions_ : tuple of str

    Examples
    --------
    >>> from instcollab.network import ThematicProfile
    >>> from instcollab.expertise import rank_profile
    >>> profiles = [rank_profile(ThematicProfile(i, {"ml": s, "iot": 1}))
    ...             for i, s in [("a", 9), ("b", 8), ("c", 2)]]
    >>> rec = CollaborationRecommender().fit(profiles)
    >>> rec.recommend("a")["ml"][0].institutions
    ['b']
    """

    def __init__(self, delta=0.75, eliminate_zero_rows=True):
        self.delta = delta
        self.eliminate_zero_rows = eliminate_zero_rows

    def fit(self, X, y=None):
        X = check_profiles(X, RankedProfile)
        check_delta(self.delta)
        self.matrices_ = build_ti_matrices(X, self.eliminate_zero_rows)
        self.institutions_ = self.matrices_.institutions
        return self

    def recommend(self, institution, area=None):
        """All recommendations for *institution*, or only those for *area*."""
        check_is_fitted(self, "matrices_")
        results = recommend_all(institution, self.matrices_, self.delta)
        if area is None:
            return results
        if area not in results:
            raise ValueError(f"{area!r} is neither a core nor a potential area of {institution!r}")
        return {area: results[area]}

    def predict(self, X):
        """Recommendations for each institution in *X*.

        *X* holds ranked profiles (as produced upstream in a pipeline) or
        plain institution ids; every institution must have been seen in
        ``fit``.
        """
        check_is_fitted(self, "matrices_")
        ids = [x.institution_id if isinstance(x, RankedProfile) else x for x in X]
        for i in ids:
            if i not in self.matrices_.institutions:
                raise UnknownInstitution(i)
        return [self.recommend(i) for i in ids]
