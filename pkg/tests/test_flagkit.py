"""Flag maps, the subset census, the decomposition lemma, collineations."""

import pytest

from flagval.errors import InvalidInput, SizeBound
from flagval.flagkit import (
    StarMap,
    check_decomposition_lemma,
    classify_flag_subsets,
    collineation_analyze,
    flag_subset_table,
    is_flag_map,
    is_flag_subset,
    line_criterion,
    prop_equivalence_exhaustive_q2,
    prop_equivalence_random,
    set_partitions,
    star_condition,
    subset_family,
    sweep_decomposition_lemma,
)
from flagval.projspace import geometry

FANO = geometry(2, 2)


def test_census_q2():
    census = classify_flag_subsets(2)
    assert census.total == 70
    assert census.counts == {
        "point": 7,
        "line": 7,
        "punctured-line": 21,
        "plane-minus-point": 7,
        "plane-minus-line": 7,
        "plane-minus-punctured-line": 21,
    }
    assert census.mismatches == []


def test_census_q3():
    census = classify_flag_subsets(3)
    assert census.total == 156
    assert census.counts == {
        "point": 13,
        "line": 13,
        "punctured-line": 52,
        "plane-minus-point": 13,
        "plane-minus-line": 13,
        "plane-minus-punctured-line": 52,
    }
    assert census.mismatches == []


def test_census_size_bound():
    with pytest.raises(SizeBound):
        classify_flag_subsets(4)  # 21 points is past the census window


def test_flag_subset_table_matches_census():
    table = flag_subset_table(2)
    assert len(table) == 70
    assert all(subset_family(FANO, s) is not None for s in table)


def test_is_flag_map_verdicts():
    # constant map: flag, realized by any chain
    v = is_flag_map(FANO, [1] * 7)
    assert v.is_flag and v.chain is not None
    # indicator of a line: flag
    line = FANO.lines[0]
    v = is_flag_map(FANO, [1 if i in line else 0 for i in range(7)])
    assert v.is_flag
    # two points of a line plus one off it: the line criterion holds but
    # no stratum chain realizes the map, so no witness line exists
    bad = {line[0], line[1], min(i for i in range(7) if i not in line)}
    v = is_flag_map(FANO, [1 if i in bad else 0 for i in range(7)])
    assert not v.is_flag
    assert v.chain is None and v.witness_line is None
    # a line showing three distinct values names itself as the witness
    vals = [0] * 7
    vals[line[1]] = 1
    vals[line[2]] = 2
    v = is_flag_map(FANO, vals)
    assert not v.is_flag
    assert v.witness_line is not None


def test_is_flag_subset_families():
    line = frozenset(FANO.lines[0])
    assert is_flag_subset(FANO, line)
    assert is_flag_subset(FANO, frozenset([3]))
    assert is_flag_subset(FANO, frozenset(range(7)) - line)
    punctured = line - {min(line)}
    assert is_flag_subset(FANO, punctured)
    assert subset_family(FANO, punctured) == "punctured-line"
    # a triangle (three points not on a line) is not a flag subset
    tri = None
    import itertools

    for combo in itertools.combinations(range(7), 3):
        if not any(set(combo) <= set(L) for L in FANO.lines):
            tri = frozenset(combo)
            break
    assert tri is not None
    assert not is_flag_subset(FANO, tri)
    assert subset_family(FANO, tri) is None


def test_line_criterion_agrees_on_flag_maps():
    line = FANO.lines[1]
    values = [1 if i in line else 0 for i in range(7)]
    assert line_criterion(FANO, values)
    assert is_flag_map(FANO, values).is_flag


def test_prop_equivalence_exhaustive_q2_frozen():
    r = prop_equivalence_exhaustive_q2()
    assert r["cases_total"] == 2187
    assert r["line_ok"] == 507
    assert r["chain_flag"] == 339
    assert r["mismatches"] == 168
    assert r["mismatch_direction_line_only"] == 168
    assert r["mismatch_direction_chain_only"] == 0
    assert r["witnesses"][0] == [1, 1, 0, 1, 0, 0, 0]


def test_prop_equivalence_random_frozen():
    r = prop_equivalence_random(2, 3, 2000, 7)
    assert r["cases_total"] == 2000
    assert r["mismatches"] == 0
    assert r["line_ok"] == 1 and r["chain_flag"] == 1
    # P^3(F_2): the line criterion is strictly weaker on random maps
    r2 = prop_equivalence_random(3, 2, 2000, 7)
    assert r2["mismatches"] == r2["mismatch_direction_line_only"]
    assert r2["mismatch_direction_chain_only"] == 0


def test_set_partitions_bell_numbers():
    assert sum(1 for _ in set_partitions(4)) == 15
    assert sum(1 for _ in set_partitions(5)) == 52
    # each partition covers range(n) disjointly
    for blocks in set_partitions(4):
        seen = set()
        for b in blocks:
            assert not (seen & b)
            seen |= b
        assert seen == {0, 1, 2, 3}


def test_check_decomposition_lemma_explicit():
    line = frozenset(FANO.lines[0])
    rest = sorted(set(range(7)) - line)
    # distinguished part = line, remaining four points split into singles
    parts = [line] + [frozenset([i]) for i in rest]
    v = check_decomposition_lemma(FANO, parts)
    assert v.kind in ("holds", "hypothesis-fails")
    with pytest.raises(InvalidInput):
        check_decomposition_lemma(FANO, [line, frozenset(rest)])  # 2 parts
    with pytest.raises(InvalidInput):
        check_decomposition_lemma(FANO, [line, frozenset(), frozenset(rest)])
    with pytest.raises(InvalidInput):
        check_decomposition_lemma(
            FANO, [line, frozenset(rest[:2]), frozenset(rest[:2] + rest[2:])]
        )  # overlap


def test_lemma_sweep_q2_frozen():
    r = sweep_decomposition_lemma(2)
    assert r["cases_total"] == 3136
    assert r["hypothesis_held"] == 77
    assert r["holds"] == 77
    assert r["strict_gap"] == 0
    assert r["counterexample_candidates"] == []
    with pytest.raises(SizeBound):
        sweep_decomposition_lemma(3)


def test_star_condition_explicit():
    # an image inside one affine line of the target always satisfies (*)
    pairs = []
    for pt in geometry(2, 2).points:
        a, b, c = pt.coords
        pairs.append(((a + b) % 2, 1))
    m = StarMap(2, 2, tuple(pairs))
    assert star_condition(m)
    ok, witness = star_condition(m, with_witness=True)
    assert ok and witness is None
    # three collinear points with pairwise distinct images break (*)
    line = geometry(2, 2).lines[0]
    bad_pairs = [(0, 0)] * 7
    bad_pairs[line[0]] = (0, 1)
    bad_pairs[line[1]] = (1, 0)
    bad_pairs[line[2]] = (1, 1)
    bad = StarMap(2, 2, tuple(bad_pairs))
    ok, witness = star_condition(bad, with_witness=True)
    assert not ok and witness is not None
    with pytest.raises(InvalidInput):
        star_condition(StarMap(2, 2, ((0, 0),) * 6))


def test_collineation_p2_frozen():
    rep = collineation_analyze(2)
    assert rep.maps_examined == 4**7
    assert rep.star_maps == 1264
    assert rep.max_image_size == 3
    assert rep.image_size_counts == {1: 4, 2: 756, 3: 504}
    assert rep.image_size_violations == []
    assert rep.no_flag_combo_maps == 0
    # the model failure: (*) maps that are not jointly flag exist
    assert rep.non_flag_star_maps == 336
    assert rep.first_non_flag_star == [0, 0, 0, 0, 1, 1, 1]
    assert rep.flag_combo_violations == []


def test_collineation_errors():
    with pytest.raises(SizeBound):
        collineation_analyze(5)
    with pytest.raises(InvalidInput):
        collineation_analyze(3, mode="sampled", samples=10)  # seed missing
    with pytest.raises(InvalidInput):
        collineation_analyze(3, mode="nonsense")


def test_collineation_sampled_smoke():
    rep = collineation_analyze(3, mode="sampled", samples=2000, seed=5)
    assert rep.maps_examined == 2000
    assert rep.image_size_violations == []
    assert rep.flag_combo_violations == []
