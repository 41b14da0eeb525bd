import csv
import io
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shannon_lattice.construction import ConstructionParams, derive
from shannon_lattice.limits import (
    SCAN_COLUMNS,
    ScanLimits,
    choose_b,
    convergence_csv,
    convergence_row,
    convergence_table,
    delta,
    endpoints,
    exact_root,
    family_tags,
    hypotheses,
    nth_root_interval,
    scan,
    scan_csv,
)


def test_exact_root():
    assert exact_root(Fraction(32), 5) == 2
    assert exact_root(Fraction(8, 27), 3) == Fraction(2, 3)
    assert exact_root(Fraction(2), 2) is None


@given(st.fractions(min_value=Fraction(1, 50), max_value=10**6, max_denominator=50), st.integers(1, 9))
def test_root_interval_encloses(x, n):
    iv = nth_root_interval(x, n, 40)
    flo, fhi = endpoints(iv)
    assert flo <= fhi
    assert flo**n <= x <= fhi**n


def test_delta_examples():
    d = delta((2, 1, 2, 1, 0))
    assert d.ratio == Fraction(5, 2) and d.inner == 5
    with mpmath.workdps(60):
        assert abs(d.value - (mpmath.mpf(5) / 2 - mpmath.sqrt(5))) < mpmath.mpf(10) ** -40
    assert d.hypotheses_met and d.certified and d.exact_check
    assert d.bound == 12
    doc = d.to_json()
    assert doc["certified"] and doc["bound"] == "12"


def test_delta_zero_when_s_vanishes_and_r_zero():
    d = delta((3, 1, 2, 0, 0))
    assert d.value == 0


def test_hypotheses():
    assert hypotheses(2, 1, 2, 1, 0)
    assert not hypotheses(2, 3, 2, 1, 0)
    assert not hypotheses(2, 1, 2, 1, 5)


@given(st.integers(1, 6), st.integers(1, 4), st.integers(1, 4), st.data())
def test_delta_is_ratio_minus_root(n, k, b, data):
    r = data.draw(st.integers(0, b))
    s = data.draw(st.integers(0, b**n))
    d = delta((n, k, b, r, s), 40)
    t = derive(ConstructionParams(n, k, b, r, s))
    assert Fraction(t.p, t.q) <= d.ratio
    if d.hypotheses_met:
        assert d.certified and d.exact_check


def test_choose_b():
    assert choose_b(Fraction(1, 2)) == 3
    assert choose_b(1) == 2
    assert choose_b(Fraction(1, 10)) == 11
    with pytest.raises(ValueError):
        choose_b(0)


def test_convergence_examples():
    row = convergence_row(16, 1)
    assert row.params == (5, 1, 2, 0, 0)
    assert row.p == 16**5 and row.gap_upper <= mpmath.mpf(10) ** -50
    row = convergence_row(2, 1)
    assert row.degenerate
    row = convergence_row(Fraction(2001, 2), Fraction(1, 2))
    assert row.r == 1 and 0 < row.gap_upper < 1
    assert row.within_bound
    with pytest.raises(ValueError):
        convergence_row(2, Fraction(1, 2))


def test_convergence_schedule():
    rows = convergence_table([100, 1000, 10000], Fraction(1, 2))
    assert [r.n for r in rows] == [5, 7, 9]
    assert [r.gap_bound for r in rows] == [Fraction(197, 10), Fraction(199, 14), Fraction(67, 6)]
    assert all(r.within_bound for r in rows)
    text = convergence_csv(rows)
    assert text.splitlines()[0].startswith("x,epsilon,b,m")
    assert len(text.splitlines()) == 4


def test_scan_contains_known_points():
    res = scan(ScanLimits(2, 1, 2, 1), certify_fraction=1)
    by = {pt.params: pt for pt in res.points}
    purple = by[(2, 1, 2, 1, 0)]
    with mpmath.workdps(30):
        assert purple.ratio == Fraction(5, 2) and abs(purple.root - mpmath.sqrt(5)) < 1e-25
    assert "purple" in purple.tags and "yellow" in purple.tags
    green = by[(2, 1, 2, 1, 1)]
    assert green.ratio == Fraction(10, 3) and "green" in green.tags
    assert not res.failed and len(res.certified) == len(res.points)
    assert [pt.ratio for pt in res.points] == sorted(pt.ratio for pt in res.points)


def test_scan_empty():
    assert scan(ScanLimits()).points == []


def test_scan_points_respect_ratio():
    res = scan(ScanLimits(3, 3, 3, 6), certify_fraction=0)
    for pt in res.points:
        n, k, b, r, s = pt.params
        assert 2 <= pt.ratio <= 7
        assert pt.ratio <= Fraction(pt.a, b)
        d = delta(pt.params, 30)
        if d.inner == pt.p:
            # Delta measures the gap below a/b exactly when the inner term is p
            with mpmath.workdps(30):
                assert abs(mpmath.mpf(pt.a) / b - pt.root - d.value) < 1e-20


def test_scan_csv_schema():
    res = scan(ScanLimits(2, 2, 2, 2), certify_fraction=0)
    rows = list(csv.reader(io.StringIO(scan_csv(res.points))))
    assert rows[0] == SCAN_COLUMNS and len(rows) == len(res.points) + 1
    assert any(r[12] == "1" for r in rows[1:])


def test_scan_workers_are_deterministic():
    lim = ScanLimits(3, 4, 3, 6)
    one = scan(lim, certify_fraction=0.5, seed=3)
    two = scan(lim, certify_fraction=0.5, seed=3, workers=2)
    assert scan_csv(one.points) == scan_csv(two.points)
    assert one.certified == two.certified and one.failed == two.failed == []


def test_family_tags():
    assert family_tags(2, 1, 0) == ["purple", "yellow"]
    assert family_tags(2, 1, 1) == ["green"]
    assert family_tags(1, 1, 1) == ["blue"]
    assert family_tags(3, 2, 4) == []
