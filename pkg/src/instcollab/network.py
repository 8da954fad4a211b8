"""Work -> keyword affiliation networks and thematic strengths."""

from __future__ import annotations

import io
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import TextIO

from .corpus import InstitutionDataset


@dataclass(frozen=True)
class AffiliationNetwork:
    """Bipartite network of works (first mode) and keywords (second mode).

    Links always run from a work to a keyword; ``link_weight`` holds the
    weight of every link in ``links``.
    """

    institution_id: str
    first_mode: tuple
    second_mode: tuple
    links: tuple
    link_weight: Mapping = field(default_factory=dict)

    def __post_init__(self):
        works, keywords = set(self.first_mode), set(self.second_mode)
        for w, k in self.links:
            if w not in works or k not in keywords:
                raise ValueError(f"link ({w!r}, {k!r}) does not join work to keyword")
        if set(self.link_weight) != set(self.links):
            raise ValueError("every link needs exactly one weight")
        for link, y in self.link_weight.items():
            if not y >= 0 or math.isinf(y):
                raise ValueError(f"link {link} has invalid weight {y!r}")

    @property
    def n_vertices(self) -> int:
        return len(self.first_mode) + len(self.second_mode)

    @property
    def n_links(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class ThematicProfile:
    institution_id: str
    strength: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for kw, s in self.strength.items():
            if not s >= 0:
                raise ValueError(f"negative strength for {kw!r}")


def build_wka(dataset: InstitutionDataset) -> AffiliationNetwork:
    """Unweighted (all weights 1) network of a normalized dataset.

    Works without keywords are left out: they can carry no strength.
    """
    works, links = [], []
    keywords = set()
    for r in dataset.records:
        if not r.author_keywords:
            continue
        works.append(r.uid)
        for kw in r.author_keywords:
            links.append((r.uid, kw))
            keywords.add(kw)
    return AffiliationNetwork(
        dataset.institution_id,
        tuple(works),
        tuple(sorted(keywords)),
        tuple(links),
        {link: 1 for link in links},
    )


def inject_scores(net: AffiliationNetwork, score: Mapping) -> AffiliationNetwork:
    """Weight each link with the score of its work (missing scores count as 0)."""
    weights = {}
    for w, k in net.links:
        y = score.get(w, 0)
        if not y >= 0 or math.isinf(y):
            raise ValueError(f"score of {w!r} must be finite and non-negative")
        weights[(w, k)] = y
    return AffiliationNetwork(
        net.institution_id, net.first_mode, net.second_mode, net.links, weights
    )


def citation_scores(dataset: InstitutionDataset) -> dict:
    return {r.uid: r.citation_count for r in dataset.records}


def weighted_indegree(net: AffiliationNetwork) -> ThematicProfile:
    """Sum of incoming link weights per keyword.

    Integer weights give exact integer strengths; otherwise the sum is
    correctly rounded (``math.fsum``) so it does not depend on link order.
    """
    incoming = {}
    for link in net.links:
        incoming.setdefault(link[1], []).append(net.link_weight[link])
    strength = {}
    for kw in sorted(incoming):
        ys = incoming[kw]
        if all(isinstance(y, int) for y in ys):
            strength[kw] = sum(ys)
        else:
            strength[kw] = math.fsum(ys)
    return ThematicProfile(net.institution_id, strength)


def thematic_profile(
    dataset: InstitutionDataset, scores: Mapping | None = None
) -> ThematicProfile:
    """Build, inject and measure in one call.

    *scores* overrides the citation counts for the works it lists.
    """
    base = citation_scores(dataset)
    if scores:
        base.update({uid: scores[uid] for uid in base if uid in scores})
    return weighted_indegree(inject_scores(build_wka(dataset), base))


def read_score_file(text: str | TextIO) -> dict:
    """Parse ``uid<TAB>score`` lines into a score override map."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    scores = {}
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {line_no}: expected 'uid<TAB>score'")
        uid, raw = parts[0].strip(), parts[1].strip()
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                raise ValueError(f"line {line_no}: non-numeric score {raw!r}") from None
        if not value >= 0 or math.isinf(value):
            raise ValueError(f"line {line_no}: score must be finite and non-negative")
        scores[uid] = value
    return scores
