"""Reading tab-delimited Web of Science exports into per-institution datasets."""

from __future__ import annotations

import io
import os
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from .exceptions import MalformedRow, MissingColumn, NonNumericScore

_DIGITS = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class PublicationRecord:
    uid: str
    author_keywords: tuple = ()
    citation_count: int = 0
    year: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "author_keywords", tuple(self.author_keywords))
        if self.citation_count < 0:
            raise ValueError(f"negative citation count for {self.uid!r}")
        if any(not k.strip() for k in self.author_keywords):
            raise ValueError(f"empty keyword in record {self.uid!r}")


@dataclass(frozen=True)
class InstitutionDataset:
    institution_id: str
    records: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for rec in self.records:
            if rec.uid in seen:
                raise ValueError(
                    f"duplicate record uid {rec.uid!r} in {self.institution_id!r}"
                )
            seen.add(rec.uid)

    def __len__(self):
        return len(self.records)

    def keywords(self):
        """Distinct keywords in first-seen order."""
        return list(dict.fromkeys(k for r in self.records for k in r.author_keywords))


@dataclass(frozen=True)
class CorpusConfig:
    min_publications: int = 25
    year_range: tuple = (2010, 2019)
    score_field_tag: str = "Z9"

    def __post_init__(self):
        if self.min_publications < 0:
            raise ValueError("min_publications must be >= 0")
        start, end = self.year_range
        if start > end:
            raise ValueError(f"empty year range {self.year_range}")


def split_keyword_field(raw: str) -> list:
    """Split a ``DE`` cell into lowercase keywords.

    Order is preserved and repeats collapse to their first occurrence.

    >>> split_keyword_field("Cyber physical system (cps); SVM")
    ['cyber physical system (cps)', 'svm']
    """
    out = dict.fromkeys(
        part.strip().lower() for part in raw.split(";") if part.strip()
    )
    return list(out)


def _parse_int(value: str):
    value = value.strip()
    if not value:
        return None
    if not _DIGITS.fullmatch(value):
        raise ValueError(value)
    return int(value)


def parse_wos_export(
    text: str | TextIO, institution_id: str, score_field_tag: str = "Z9"
) -> InstitutionDataset:
    """Parse one tab-separated WoS export.

    Parameters
    ----------
    text : str or text stream
        Export contents. The first line is the header of two-letter field
        tags; ``UT``, ``DE`` and the score tag are required, ``PY`` is
        optional.
    institution_id : str
    score_field_tag : str, default "Z9"
        Column holding the per-work score (total times cited).

    Returns
    -------
    InstitutionDataset

    Raises
    ------
    MissingColumn
        ``UT``, ``DE`` or the score column is absent.
    MalformedRow
        A row's column count differs from the header, its ``UT`` is blank
        or repeated, or its ``PY`` is not an integer.
    NonNumericScore
        The score cell is non-blank and not an integer.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    header_line = stream.readline()
    header = [h.strip() for h in header_line.lstrip("\ufeff").rstrip("\r\n").split("\t")]
    for tag in ("UT", "DE", score_field_tag):
        if tag not in header:
            raise MissingColumn(tag)
    col = {tag: header.index(tag) for tag in header if tag}
    ut, de, sc = col["UT"], col["DE"], col[score_field_tag]
    py = col.get("PY")

    records = []
    seen = set()
    for line_no, line in enumerate(stream, start=2):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != len(header):
            raise MalformedRow(line_no)
        uid = cells[ut].strip()
        if not uid:
            raise MalformedRow(line_no, "blank UT")
        if uid in seen:
            raise MalformedRow(line_no, f"duplicate UT {uid!r}")
        seen.add(uid)
        try:
            score = _parse_int(cells[sc])
        except ValueError:
            raise NonNumericScore(line_no, cells[sc]) from None
        year = None
        if py is not None:
            try:
                year = _parse_int(cells[py])
            except ValueError:
                raise MalformedRow(line_no, f"non-integer year {cells[py]!r}") from None
        records.append(
            PublicationRecord(
                uid=uid,
                author_keywords=split_keyword_field(cells[de]),
                citation_count=score or 0,
                year=year,
            )
        )
    return InstitutionDataset(institution_id, records)


def write_wos_export(dataset: InstitutionDataset, stream: TextIO | None = None):
    """Serialize *dataset* in the format read by :func:`parse_wos_export`.

    Returns the text when *stream* is None.
    """
    out = stream if stream is not None else io.StringIO()
    out.write("UT\tDE\tZ9\tPY\n")
    for r in dataset.records:
        year = "" if r.year is None else str(r.year)
        out.write(f"{r.uid}\t{'; '.join(r.author_keywords)}\t{r.citation_count}\t{year}\n")
    if stream is None:
        return out.getvalue()


def apply_inclusion_filter(
    datasets: Iterable[InstitutionDataset], cfg: CorpusConfig | None = None
) -> list:
    """Trim records to the year window and drop small institutions.

    Records without a year are kept and count toward the threshold.
    """
    cfg = cfg or CorpusConfig()
    start, end = cfg.year_range
    kept = []
    for ds in datasets:
        records = [
            r for r in ds.records if r.year is None or start <= r.year <= end
        ]
        if len(records) >= cfg.min_publications:
            kept.append(InstitutionDataset(ds.institution_id, records))
    return kept


def read_corpus_dir(
    path: str | os.PathLike,
    institutions: Sequence[str] | None = None,
    score_field_tag: str = "Z9",
) -> list:
    """Parse every ``<institution_id>.tsv`` in *path*, ordered by id.

    *institutions* restricts the read to an operator-curated list of ids;
    listed ids without a file raise FileNotFoundError.
    """
    path = Path(path)
    if institutions is None:
        files = sorted(path.glob("*.tsv"))
    else:
        files = [path / f"{iid}.tsv" for iid in sorted(institutions)]
        for f in files:
            if not f.is_file():
                raise FileNotFoundError(f)
    datasets = []
    for f in files:
        with open(f, encoding="utf-8", newline="") as fh:
            datasets.append(parse_wos_export(fh, f.stem, score_field_tag))
    return datasets
