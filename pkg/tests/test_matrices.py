import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from synth import random_profiles

from instcollab.exceptions import UnknownInstitution
from instcollab.expertise import rank_profile
from instcollab.matrices import (
    build_ti_matrices,
    read_ti_dump,
    union_keywords,
    write_ti_dump,
)
from instcollab.network import ThematicProfile
from instcollab.recommender import recommend_all


def rp(iid, strength):
    return rank_profile(ThematicProfile(iid, strength))


def test_union_keywords():
    a = rp("a", {"x": 1, "y": 2, "z": 3})
    b = rp("b", {"p": 1, "q": 2, "r": 3})
    assert union_keywords([a]) == ["x", "y", "z"]
    assert len(union_keywords([a, b])) == 6


def test_layout_and_values():
    a = rp("a", {"ml": 9, "iot": 2})
    b = rp("b", {"ml": 3, "vision": 5})
    M = build_ti_matrices([a, b])
    assert M.areas == ("iot", "ml", "vision")
    assert M.institutions == ("a", "b")
    np.testing.assert_array_equal(M.citation, [[2, 0], [9, 3], [0, 5]])
    assert M.crr[M.area_row("ml"), M.column("b")] == 3 / 2
    assert M.ccsrr[M.area_row("ml"), M.column("b")] == 8 / 4
    assert M.area_row("missing") is None
    with pytest.raises(UnknownInstitution):
        M.column("zz")


def test_uncited_rows_dropped():
    a = rp("a", {"ml": 4, "ghost": 0})
    b = rp("b", {"ml": 1, "ghost": 0, "kept": 0})
    c = rp("c", {"kept": 2})
    M = build_ti_matrices([a, b, c])
    assert M.areas == ("kept", "ml")
    full = build_ti_matrices([a, b, c], eliminate_zero_rows=False)
    assert full.areas == ("ghost", "kept", "ml")


def test_matrices_are_read_only():
    M = build_ti_matrices([rp("a", {"x": 1})])
    with pytest.raises(ValueError):
        M.citation[0, 0] = 3


def test_dump_round_trip():
    M = build_ti_matrices([rp("a", {"x": 1, "y": 2.5}), rp("b", {"x": 7}), rp("c", {})])
    text = write_ti_dump(M)
    assert text.splitlines()[0] == "keyword\tinstitution\tcitation\tcrr\tccsrr"
    assert read_ti_dump(text, M.institutions) == M


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matrix_invariants(seed):
    rng = np.random.default_rng(seed)
    profiles = random_profiles(rng, int(rng.integers(1, 6)), int(rng.integers(1, 15)))
    M = build_ti_matrices(profiles)
    assert M.citation.shape == M.crr.shape == M.ccsrr.shape
    assert not np.any(np.all(M.citation == 0, axis=1))
    assert np.array_equal(M.citation > 0, M.crr > 0)
    assert np.array_equal(M.citation > 0, M.ccsrr > 0)
    assert len(M.areas) <= len(union_keywords(profiles))
    # every nonzero cell equals the owning profile entry
    for j, p in enumerate(profiles):
        for e in p.entries:
            row = M.area_row(e.keyword)
            if e.strength > 0:
                assert (M.citation[row, j], M.crr[row, j], M.ccsrr[row, j]) == (e.strength, e.crr, e.ccsrr)
            elif row is not None:
                assert M.citation[row, j] == 0
    assert build_ti_matrices(profiles) == M
    assert read_ti_dump(write_ti_dump(M), M.institutions) == M


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_zero_row_elimination_does_not_change_recommendations(seed):
    rng = np.random.default_rng(seed)
    profiles = random_profiles(rng, int(rng.integers(2, 6)), int(rng.integers(1, 12)), max_strength=6)
    lean = build_ti_matrices(profiles)
    full = build_ti_matrices(profiles, eliminate_zero_rows=False)
    for p in profiles:
        assert recommend_all(p.institution_id, lean) == recommend_all(p.institution_id, full)
