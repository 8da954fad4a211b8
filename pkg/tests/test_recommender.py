import io
from pathlib import Path

import numpy as np
import pytest
from sklearn.base import clone
from synth import single_area_matrix

from instcollab.exceptions import AreaNotCore, AreaNotPotential, UnknownInstitution
from instcollab.expertise import rank_profile
from instcollab.matrices import build_ti_matrices
from instcollab.network import ThematicProfile
from instcollab.recommender import (
    CSV_HEADER,
    CollaborationRecommender,
    RecommendationRequest,
    potential_areas,
    read_recommendations_csv,
    recommend_all,
    strategy1,
    strategy2,
    strong_areas,
    write_recommendations_csv,
)

DATA = Path(__file__).parent / "data"


def _rows(name):
    lines = (DATA / name).read_text(encoding="utf-8").splitlines()[1:]
    return [(inst, int(s)) for inst, s in (ln.split("\t") for ln in lines)]


def machine_learning_matrix():
    """BHU (strength 60, core) among 60 other core institutions and 5 non-core ones."""
    listed = _rows("ml_strategy1.tsv")
    rows = [("BHU", 60, 3.0, 4.0)]
    rows += [(inst, s, 2.0, 3.0) for inst, s in listed]
    # 35 more core institutions, all below 0.75 x 60
    rows += [(f"CORE {k:02d}", 44 - k, 1.0, 1.5) for k in range(35)]
    # strong citation counts but not core in the area
    rows += [(f"NONCORE {k}", 300 + k, 0.9, 1.2) for k in range(5)]
    return single_area_matrix("machine learning", rows), listed


def test_strategy1_machine_learning():
    M, listed = machine_learning_matrix()
    row = M.area_row("machine learning")
    assert int(np.sum(M.crr[row] >= 1)) == 61
    got = strategy1("BHU", "machine learning", M, 0.75)
    assert len(got) == 25
    assert got.recommendations[0] == ("VELLORE INSTITUTE OF TECHNOLOGY", 507)
    assert list(got.recommendations) == listed


def test_strategy1_threshold_is_exact():
    M = single_area_matrix("t", [("i", 60, 2, 2), ("at", 45, 2, 2), ("below", 44.999999, 2, 2)])
    assert strategy1("i", "t", M, 0.75).institutions == ["at"]
    M = single_area_matrix("t", [("i", 10, 2, 2), ("j", 8, 2, 2)])
    # 0.8 is read as 4/5, so 8 >= 0.8 * 10 holds despite binary rounding
    assert strategy1("i", "t", M, 0.8).institutions == ["j"]


def test_strategy1_unique_maximum_with_delta_one():
    M = single_area_matrix("t", [("i", 10, 5, 5), ("j", 9, 3, 3)])
    assert strategy1("i", "t", M, 1.0).institutions == []


def test_strategy1_errors():
    M = single_area_matrix("t", [("i", 10, 0.5, 1.5), ("j", 9, 3, 3)])
    with pytest.raises(AreaNotCore):
        strategy1("i", "t", M)
    with pytest.raises(AreaNotCore):
        strategy1("j", "nope", M)
    with pytest.raises(UnknownInstitution):
        strategy1("zz", "t", M)
    with pytest.raises(ValueError):
        strategy1("j", "t", M, delta=0.4)


def pso_matrix(extra_low=()):
    listed = _rows("pso_high_priority.tsv")
    rows = [("BHU", 40, 0.8, 1.2)]
    rows += [(inst, s, 1.5, 2.0) for inst, s in listed]
    # potential-only institutions, all below BHU's CCSRR
    rows += [(f"POTENTIAL {k}", 30 + k, 0.7, 1.0 + 0.05 * k) for k in range(4)]
    rows += list(extra_low)
    return single_area_matrix("pso", rows), listed


def test_strategy2_pso():
    M, listed = pso_matrix()
    high, low = strategy2("BHU", "pso", M)
    assert len(high) == 46
    assert high.recommendations[0] == ("INDIAN INSTITUTE OF TECHNOLOGY IIT DELHI", 509)
    assert list(high.recommendations) == listed
    assert len(low) == 0
    assert M.citation[0, M.column("BHU")] == 40


def test_strategy2_low_priority_includes_equal_ccsrr():
    M, _ = pso_matrix(extra_low=[("EQUAL", 12, 0.5, 1.2), ("HIGHER", 11, 0.6, 1.9)])
    _, low = strategy2("BHU", "pso", M)
    assert low.institutions == ["EQUAL", "HIGHER"]


def test_strategy2_errors():
    M = single_area_matrix("t", [("i", 10, 2, 3), ("j", 3, 0.6, 1.1), ("k", 1, 0.2, 0.5)])
    with pytest.raises(AreaNotPotential):
        strategy2("i", "t", M)
    with pytest.raises(AreaNotPotential):
        strategy2("k", "t", M)
    high, low = strategy2("j", "t", M)
    assert (high.institutions, low.institutions) == (["i"], [])


def small_world():
    profiles = [
        rank_profile(ThematicProfile("a", {"cps": 9, "dl": 6, "iot": 4, "gt": 3, "nn": 3, "bc": 1})),
        rank_profile(ThematicProfile("b", {"dl": 10, "gt": 5, "cps": 4, "nn": 3, "seg": 2})),
        rank_profile(ThematicProfile("c", {"gt": 7, "iot": 6, "bc": 3, "nn": 3, "dl": 2, "edge": 0})),
    ]
    return profiles, build_ti_matrices(profiles)


def test_strong_and_potential_areas_follow_profiles():
    profiles, M = small_world()
    for p in profiles:
        core = [e.keyword for e in p.entries[: p.x]]
        potential = [e.keyword for e in p.entries[p.x: p.xg]]
        assert strong_areas(p.institution_id, M) == core
        assert potential_areas(p.institution_id, M) == potential


def test_recommend_all_is_union_of_per_area_calls():
    _, M = small_world()
    for i in M.institutions:
        got = recommend_all(i, M)
        expected = {t: (strategy1(i, t, M),) for t in strong_areas(i, M)}
        expected.update({t: strategy2(i, t, M) for t in potential_areas(i, M)})
        assert got == expected
        assert list(got) == strong_areas(i, M) + potential_areas(i, M)


def test_recommend_all_empty():
    M = build_ti_matrices([rank_profile(ThematicProfile("a", {"x": 5})), rank_profile(ThematicProfile("z", {"x": 0.5}))])
    assert recommend_all("z", M) == {}


def test_invariants_on_small_world():
    _, M = small_world()
    for i in M.institutions:
        for t, sets in recommend_all(i, M).items():
            row = M.area_row(t)
            for rs in sets:
                for j in rs.institutions:
                    col = M.column(j)
                    assert j != i
                    assert M.citation[row, col] > 0
                    if rs.kind == "low_priority":
                        assert M.ccsrr[row, col] >= 1 and M.crr[row, col] < 1
                    else:
                        assert M.crr[row, col] >= 1
            if len(sets) == 2:
                assert not set(sets[0].institutions) & set(sets[1].institutions)


def test_csv_round_trip():
    _, M = small_world()
    results = {i: recommend_all(i, M) for i in M.institutions}
    text = write_recommendations_csv(results)
    assert text.splitlines()[0] == ",".join(CSV_HEADER) == "institution,strategy,area,kind,recommended,strength"
    rows = read_recommendations_csv(text)
    assert rows[0] == {"institution": "a", "strategy": 1, "area": "dl", "kind": "strategy1", "recommended": "b", "strength": 10}
    buf = io.StringIO()
    write_recommendations_csv(results, buf)
    assert buf.getvalue() == text
    with pytest.raises(ValueError):
        read_recommendations_csv("a,b\n1,2\n")


def test_request_validation():
    with pytest.raises(ValueError):
        RecommendationRequest("i", 3, "t")
    with pytest.raises(ValueError):
        RecommendationRequest("i", 1, "t", delta=1.5)


def test_estimator():
    profiles, M = small_world()
    est = CollaborationRecommender(delta=0.75).fit(profiles)
    assert est.matrices_ == M
    assert est.get_params() == {"delta": 0.75, "eliminate_zero_rows": True}
    assert clone(est).delta == 0.75
    assert est.predict(["a", "b"]) == [recommend_all("a", M), recommend_all("b", M)]
    assert est.predict(profiles[:1]) == [recommend_all("a", M)]
    assert est.recommend("a", "dl") == {"dl": recommend_all("a", M)["dl"]}
    with pytest.raises(UnknownInstitution):
        est.predict(["nobody"])
    with pytest.raises(ValueError):
        est.recommend("a", "seg")
    with pytest.raises(ValueError):
        CollaborationRecommender(delta=0.2).fit(profiles)


def test_unfitted_recommender():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        CollaborationRecommender().predict(["a"])
