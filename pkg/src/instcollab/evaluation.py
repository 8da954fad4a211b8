"""Novelty, coverage and diversity scores for recommendation output."""

from __future__ import annotations

import io
import json
import math
import statistics
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import TextIO

from .exceptions import (
    AllZero,
    DegenerateClassCount,
    EmptyFrequencyTable,
    OutOfRange,
)
from .recommender import HIGH_PRIORITY, LOW_PRIORITY, STRATEGY1

KINDS = (STRATEGY1, HIGH_PRIORITY, LOW_PRIORITY)
GROUPS = (1, 2, 3, 4)


class FrequencyTable(Mapping):
    """How often each institution was recommended (every count >= 1)."""

    def __init__(self, counts):
        counts = dict(counts)
        for inst, f in counts.items():
            if not isinstance(f, int) or isinstance(f, bool) or f < 1:
                raise ValueError(f"frequency of {inst!r} must be a positive integer, got {f!r}")
        self._counts = counts

    def __getitem__(self, key):
        return self._counts[key]

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __repr__(self):
        return f"FrequencyTable(n={len(self)}, total={self.total})"

    @property
    def total(self) -> int:
        return sum(self._counts.values())


class Orientation(str, Enum):
    LOWER_BETTER = "lower_better"
    HIGHER_BETTER = "higher_better"


class Band(str, Enum):
    VERY_HIGH = "Very High"
    HIGH = "High"
    MODERATE = "Moderate"
    LOW = "Low"
    VERY_LOW = "Very Low"


_BAND_EDGES = (0.15, 0.35, 0.6, 0.85)
_LOWER_BETTER_BANDS = (Band.VERY_HIGH, Band.HIGH, Band.MODERATE, Band.LOW, Band.VERY_LOW)


def _require(F):
    if len(F) == 0:
        raise EmptyFrequencyTable("frequency table is empty")


def novelty_index(F: FrequencyTable, n_target: int) -> float:
    """Median recommendation frequency over the number of target institutions.

    *n_target* counts only institutions that received at least one
    recommendation of the kind being scored. Lower is more novel.
    """
    _require(F)
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    return statistics.median(F.values()) / n_target


def gini_index(F: FrequencyTable) -> float:
    """Gini index of the recommendation proportions.

    With proportions sorted ascending as p_1..p_n,
    ``GI = (1/n) * sum((2i - n - 1) * p_i)``. 0 means every institution
    was recommended equally often.
    """
    _require(F)
    total = F.total
    p = sorted(f / total for f in F.values())
    n = len(p)
    return math.fsum((2 * i - n - 1) * pi for i, pi in enumerate(p, start=1)) / n


def jaccard_dissimilarity(a: Iterable, b: Iterable) -> float:
    """``1 - |A & B| / |A | B|``; two empty sets are identical (0)."""
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return 0.0
    return 1.0 - len(a & b) / union


def jaccard_dissimilarity_from_counts(n_a: int, n_b: int, n_ab: int) -> float:
    """Same as :func:`jaccard_dissimilarity` from set sizes and overlap."""
    if not 0 <= n_ab <= min(n_a, n_b):
        raise ValueError("overlap must lie between 0 and the smaller set size")
    union = n_a + n_b - n_ab
    return 0.0 if union == 0 else 1.0 - n_ab / union


def shannon_entropy(class_freqs) -> float:
    """Natural-log Shannon entropy of class frequencies; empty classes are skipped."""
    if isinstance(class_freqs, Mapping):
        class_freqs = list(class_freqs.values())
    freqs = list(class_freqs)
    if any(f < 0 for f in freqs):
        raise ValueError("class frequencies must be non-negative")
    freqs = [f for f in freqs if f > 0]
    if not freqs:
        raise AllZero("no class has a positive frequency")
    total = sum(freqs)
    # 0.0 - x rather than -x keeps a single class at +0.0
    return 0.0 - math.fsum((f / total) * math.log(f / total) for f in freqs)


def equitability(H: float, K: int) -> float:
    """Shannon equitability ``H / ln K``."""
    if K < 2:
        raise DegenerateClassCount(f"need at least 2 classes, got {K}")
    return H / math.log(K)


def assign_groups(x_values: Mapping) -> dict:
    """Group label per institution from its x-index.

    1: x > 80, 2: 60 < x <= 80, 3: 40 < x <= 60, 4: x <= 40.
    """
    groups = {}
    for inst, x in x_values.items():
        if x < 0:
            raise ValueError(f"negative x-index for {inst!r}")
        if x > 80:
            groups[inst] = 1
        elif x > 60:
            groups[inst] = 2
        elif x > 40:
            groups[inst] = 3
        else:
            groups[inst] = 4
    return groups


def group_sizes(groups: Mapping) -> dict:
    counts = Counter(groups.values())
    return {g: counts.get(g, 0) for g in GROUPS}


def group_frequencies(F: FrequencyTable, groups: Mapping) -> dict:
    """Total recommendation frequency per group label."""
    totals = dict.fromkeys(GROUPS, 0)
    for inst, f in F.items():
        totals[groups[inst]] += f
    return totals


def interpret_score(value: float, orientation=Orientation.LOWER_BETTER) -> Band:
    """Qualitative band of a score in [0, 1].

    For lower-is-better scores: [0, 0.15] Very High, (0.15, 0.35] High,
    (0.35, 0.6] Moderate, (0.6, 0.85] Low, above 0.85 Very Low. The
    higher-is-better scale is the mirror image.
    """
    orientation = Orientation(orientation)
    if not 0.0 <= value <= 1.0:
        raise OutOfRange(f"score {value!r} outside [0, 1]")
    idx = sum(value > edge for edge in _BAND_EDGES)
    if orientation is Orientation.HIGHER_BETTER:
        idx = len(_LOWER_BETTER_BANDS) - 1 - idx
    return _LOWER_BETTER_BANDS[idx]


# ------------------------------------------------------------------- reports

@dataclass
class EvaluationReport:
    """Metric values per recommendation kind, plus their bands.

    ``None`` marks a metric that is undefined because a kind produced no
    recommendations.
    """

    novelty: dict = field(default_factory=dict)
    gini: dict = field(default_factory=dict)
    jaccard: dict = field(default_factory=dict)
    diversity: dict = field(default_factory=dict)
    bands: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)

    def as_flat(self) -> dict:
        flat = {}
        for kind, stats in self.counts.items():
            for name, v in stats.items():
                flat[f"{name}.{kind}"] = v
        for kind, v in self.novelty.items():
            flat[f"novelty.{kind}"] = v
        for kind, v in self.gini.items():
            flat[f"gini.{kind}"] = v
        for pair, v in self.jaccard.items():
            flat[f"jaccard.{pair}"] = v
        for kind, d in self.diversity.items():
            for name, v in d.items():
                flat[f"{name}.{kind}"] = v
        for key, band in self.bands.items():
            flat[f"band.{key}"] = None if band is None else Band(band).value
        return flat

    def to_text(self) -> str:
        lines = []
        for key, v in self.as_flat().items():
            if isinstance(v, float):
                v = f"{v:.6f}"
            elif v is None:
                v = "NA"
            lines.append(f"{key} = {v}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = {
            "counts": self.counts,
            "novelty": self.novelty,
            "gini": self.gini,
            "jaccard": self.jaccard,
            "diversity": self.diversity,
            "bands": {k: None if b is None else Band(b).value for k, b in self.bands.items()},
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _band(value, orientation):
    return None if value is None else interpret_score(value, orientation)


def evaluate_recommendations(
    rows: Iterable[Mapping],
    x_values: Mapping,
    selected: Sequence[str] | None = None,
    n_classes: int = 4,
) -> EvaluationReport:
    """Score recommendation rows (as read from the recommendations CSV).

    Parameters
    ----------
    rows : iterable of mappings
        Each with ``institution``, ``kind`` and ``recommended`` keys.
    x_values : mapping institution -> x-index
        Used to group recommended institutions for the diversity scores.
    selected : sequence of institution ids, optional
        Requesting institutions to include; all by default.
    n_classes : int, default 4
    """
    selected = None if selected is None else set(selected)
    freq = {k: Counter() for k in KINDS}
    targets = {k: set() for k in KINDS}
    for row in rows:
        if selected is not None and row["institution"] not in selected:
            continue
        freq[row["kind"]][row["recommended"]] += 1
        targets[row["kind"]].add(row["institution"])
    groups = assign_groups(x_values)

    report = EvaluationReport()
    for kind in KINDS:
        F = FrequencyTable(freq[kind])
        report.counts[kind] = {"n_unique": len(F), "total": F.total, "n_targets": len(targets[kind])}
        if len(F):
            report.novelty[kind] = novelty_index(F, len(targets[kind]))
            report.gini[kind] = gini_index(F)
            H = shannon_entropy(group_frequencies(F, groups))
            report.diversity[kind] = {"entropy": H, "equitability": equitability(H, n_classes)}
        else:
            report.novelty[kind] = report.gini[kind] = None
            report.diversity[kind] = {"entropy": None, "equitability": None}
        report.bands[f"novelty.{kind}"] = _band(report.novelty[kind], Orientation.LOWER_BETTER)
        report.bands[f"gini.{kind}"] = _band(report.gini[kind], Orientation.LOWER_BETTER)
        report.bands[f"equitability.{kind}"] = _band(
            report.diversity[kind]["equitability"], Orientation.HIGHER_BETTER
        )
    for a, b in ((STRATEGY1, HIGH_PRIORITY), (STRATEGY1, LOW_PRIORITY), (HIGH_PRIORITY, LOW_PRIORITY)):
        key = f"{a}|{b}"
        report.jaccard[key] = jaccard_dissimilarity(freq[a], freq[b])
        report.bands[f"jaccard.{key}"] = _band(report.jaccard[key], Orientation.HIGHER_BETTER)
    return report


def read_frequency_fixture(text: str | TextIO):
    """Parse ``institution<TAB>frequency<TAB>group`` rows.

    A first line starting with ``institution`` is taken as a header.

    Returns
    -------
    (FrequencyTable, dict institution -> group)
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    counts, groups = {}, {}
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if line_no == 1 and parts[0].strip().lower() == "institution":
            continue
        if len(parts) != 3:
            raise ValueError(f"line {line_no}: expected institution, frequency, group")
        inst = parts[0].strip()
        if inst in counts:
            raise ValueError(f"line {line_no}: duplicate institution {inst!r}")
        try:
            counts[inst] = int(parts[1])
            groups[inst] = int(parts[2])
        except ValueError:
            raise ValueError(f"line {line_no}: frequency and group must be integers") from None
        if groups[inst] not in GROUPS:
            raise ValueError(f"line {line_no}: group must be one of {GROUPS}")
    return FrequencyTable(counts), groups


def evaluate_fixture(F: FrequencyTable, groups: Mapping, n_target: int, n_classes: int = 4) -> dict:
    """Novelty, Gini, entropy and equitability of a single frequency table."""
    H = shannon_entropy(group_frequencies(F, groups))
    E = equitability(H, n_classes)
    N = novelty_index(F, n_target)
    GI = gini_index(F)
    return {
        "n_unique": len(F),
        "total": F.total,
        "novelty": N,
        "gini": GI,
        "entropy": H,
        "equitability": E,
        "band.novelty": interpret_score(N, Orientation.LOWER_BETTER).value,
        "band.gini": interpret_score(GI, Orientation.LOWER_BETTER).value,
        "band.equitability": interpret_score(E, Orientation.HIGHER_BETTER).value,
    }
