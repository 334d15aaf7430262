"""Smoke tests for the r4geom Python module."""
import json

import pytest

import r4geom


def test_generate_is_deterministic():
    a = r4geom.generate("TETRAHEDRA", 8, 50, 3)
    assert a == r4geom.generate("TETRAHEDRA", 8, 50, 3)
    assert len(json.loads(a)["objects"]) == 8


@pytest.mark.parametrize("sigma", ["1", "1.5", "2", "3", "6"])
def test_query_matches_oracle(sigma):
    t = r4geom.generate("TETRAHEDRA", 30, 30, 1)
    s = r4geom.generate("SEGMENTS", 40, 30, 2)
    got = r4geom.query("seg-tetra", t, s, sigma=sigma)
    ref = r4geom.oracle("seg-tetra", t, s)
    assert got["pairs"] == ref["pairs"]
    assert got["count"] == ref["count"] == len(ref["pairs"])


def test_flats_and_triangles():
    f = r4geom.generate("FLATS_AND_LINES", 20, 20, 4)
    assert r4geom.query("line-flat", f)["pairs"] == r4geom.oracle("line-flat", f)["pairs"]
    r = r4geom.generate("TRIANGLES", 25, 20, 5)
    assert r4geom.query("tri-tri", r, r, mode="count")["count"] == r4geom.oracle("tri-tri", r, r)["count"]


def test_schema_error():
    s = r4geom.generate("SEGMENTS", 5, 10, 1)
    with pytest.raises(ValueError):
        r4geom.query("seg-tetra", s, s)


def test_collisions_and_arrangement():
    m = r4geom.generate("MOVING_TETRAHEDRA", 10, 6, 2)
    got = r4geom.collisions(m)
    ref = r4geom.collisions(m, oracle=True)
    assert [p[:2] for p in got["pairs"]] == [p[:2] for p in ref["pairs"]]
    t = r4geom.generate("TETRAHEDRA", 12, 40, 1)
    assert r4geom.k_counts(t) == r4geom.k_counts(t, oracle=True)


def test_formulas():
    assert r4geom.q_tradeoff_exponent("2") == "1/2"
    assert r4geom.q_tradeoff_exponent("1") == "5/6"
    assert r4geom.q_tradeoff_exponent("6") == "0"
    assert r4geom.batched_cost_exponent("1")[2] == "13/8"
    assert r4geom.batched_breakpoint() == "3/2"
    s, q = r4geom.unfold_wide()
    assert abs(s - 2) <= 0.05 and abs(q - 0.5) <= 0.05
    assert all(abs(e - p) <= 0.02 for _, e, p in r4geom.tradeoff_curve())
