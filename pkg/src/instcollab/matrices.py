"""Thematic area x institution matrices (citation, CRR and CCSRR weighted)."""

from __future__ import annotations

import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .exceptions import UnknownInstitution
from .expertise import RankedProfile


@dataclass(frozen=True, eq=False)
class TIMatrices:
    """Aligned m x n matrices; rows are areas, columns institutions.

    A stored area has positive citation strength for at least one
    institution. Areas missing from an institution's profile hold 0 in
    all three matrices.
    """

    areas: tuple
    institutions: tuple
    citation: np.ndarray
    crr: np.ndarray
    ccsrr: np.ndarray

    def __post_init__(self):
        shape = (len(self.areas), len(self.institutions))
        for name in ("citation", "crr", "ccsrr"):
            arr = np.array(getattr(self, name), dtype=np.float64).reshape(shape)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if len(set(self.institutions)) != len(self.institutions):
            raise ValueError("duplicate institution column")
        if len(set(self.areas)) != len(self.areas):
            raise ValueError("duplicate area row")
        object.__setattr__(self, "_area_pos", {a: i for i, a in enumerate(self.areas)})
        object.__setattr__(self, "_inst_pos", {s: j for j, s in enumerate(self.institutions)})

    @property
    def shape(self):
        return self.citation.shape

    def area_row(self, area) -> int | None:
        return self._area_pos.get(area)

    def column(self, institution) -> int:
        try:
            return self._inst_pos[institution]
        except KeyError:
            raise UnknownInstitution(institution) from None

    def __eq__(self, other):
        if not isinstance(other, TIMatrices):
            return NotImplemented
        return (
            self.areas == other.areas
            and self.institutions == other.institutions
            and all(
                np.array_equal(getattr(self, n), getattr(other, n))
                for n in ("citation", "crr", "ccsrr")
            )
        )


def union_keywords(profiles: Iterable[RankedProfile]) -> list:
    """Sorted union of every institution's thematic areas."""
    return sorted({e.keyword for p in profiles for e in p.entries})


def build_ti_matrices(
    profiles: Sequence[RankedProfile], eliminate_zero_rows: bool = True
) -> TIMatrices:
    """Fill the three matrices from ranked profiles.

    Columns follow the order of *profiles*, rows the sorted keyword union.
    With *eliminate_zero_rows*, areas in which no institution has positive
    strength are dropped from all three matrices.
    """
    profiles = list(profiles)
    areas = union_keywords(profiles)
    row = {a: i for i, a in enumerate(areas)}
    shape = (len(areas), len(profiles))
    citation, crr, ccsrr = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    for j, p in enumerate(profiles):
        for e in p.entries:
            i = row[e.keyword]
            citation[i, j] = e.strength
            crr[i, j] = e.crr
            ccsrr[i, j] = e.ccsrr
    if eliminate_zero_rows:
        keep = np.flatnonzero(np.any(citation > 0, axis=1))
        areas = [areas[i] for i in keep]
        citation, crr, ccsrr = citation[keep], crr[keep], ccsrr[keep]
    return TIMatrices(
        tuple(areas), tuple(p.institution_id for p in profiles), citation, crr, ccsrr
    )


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_ti_dump(M: TIMatrices, stream: TextIO | None = None):
    """Coordinate dump of nonzero cells: keyword, institution, citation, crr, ccsrr.

    Values are written with full precision so the dump reloads exactly.
    """
    out = stream if stream is not None else io.StringIO()
    out.write("keyword\tinstitution\tcitation\tcrr\tccsrr\n")
    rows, cols = np.nonzero(M.citation)
    for i, j in zip(rows, cols):
        out.write(
            f"{M.areas[i]}\t{M.institutions[j]}\t{_fmt(M.citation[i, j])}"
            f"\t{_fmt(M.crr[i, j])}\t{_fmt(M.ccsrr[i, j])}\n"
        )
    if stream is None:
        return out.getvalue()


def read_ti_dump(text: str | TextIO, institutions: Sequence[str]) -> TIMatrices:
    """Rebuild matrices from :func:`write_ti_dump` output.

    *institutions* fixes the column order (institutions with no nonzero
    cell do not appear in the dump).
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    header = stream.readline().rstrip("\r\n").split("\t")
    if header != ["keyword", "institution", "citation", "crr", "ccsrr"]:
        raise ValueError("not a T-I coordinate dump")
    cells = []
    for line_no, line in enumerate(stream, start=2):
        line = line.rstrip("\r\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"line {line_no}: expected 5 columns")
        cells.append((parts[0], parts[1], *(float(v) for v in parts[2:])))
    areas = sorted({c[0] for c in cells})
    row = {a: i for i, a in enumerate(areas)}
    col = {s: j for j, s in enumerate(institutions)}
    shape = (len(areas), len(institutions))
    mats = [np.zeros(shape) for _ in range(3)]
    for kw, inst, *values in cells:
        if inst not in col:
            raise UnknownInstitution(inst)
        for mat, v in zip(mats, values):
            mat[row[kw], col[inst]] = v
    return TIMatrices(tuple(areas), tuple(institutions), *mats)
