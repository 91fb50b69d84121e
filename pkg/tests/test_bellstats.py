import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from conftest import cond_families, family_from_correlations, product_families
from hypothesis import given

from bellmodels.bellstats import (
    Spreadsheet,
    chsh,
    chsh_of_coupling,
    no_signalling,
    row_values,
    spreadsheet_chsh,
)
from bellmodels.errors import AlphabetViolation, EmptySheet, ValidationError
from bellmodels.lhv import Coupling, DeterministicStrategy
from bellmodels.probcore import SETTING_PAIRS, Alphabet, CondFamily


def test_chsh_uniform():
    report = chsh(CondFamily.uniform())
    assert all(e == 0 for e in report.correlations.values())
    assert all(s == 0 for s in report.s_values.values())
    assert report.s_max == 0


def test_chsh_pr_box(pr_box):
    report = chsh(pr_box)
    assert report.correlations == {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): -1}
    assert report.s_max == 4
    assert report.s_values[2, 2] == 4
    assert report.violates_local_bound


def test_chsh_three_quarters():
    e = Fraction(3, 4)
    report = chsh(family_from_correlations({(1, 1): e, (1, 2): e, (2, 1): e, (2, 2): -e}))
    # minus sign on (2,2): 3/4 + 3/4 + 3/4 + 3/4
    assert report.s_values[2, 2] == 3
    assert report.s_max == 3


def test_chsh_sign_patterns_are_all_computed():
    # violation hidden in a non-canonical pattern
    report = chsh(family_from_correlations({(1, 1): -1, (1, 2): 1, (2, 1): 1, (2, 2): 1}))
    assert report.s_values[1, 1] == 4
    assert report.s_values[2, 2] == 0
    assert report.s_max == 4


def test_chsh_rejects_ternary():
    with pytest.raises(AlphabetViolation):
        chsh(CondFamily.uniform(Alphabet.TERNARY))


@given(cond_families())
def test_chsh_invariant_under_global_relabelling(cond):
    assert chsh(cond.relabel()) == chsh(cond)


@given(cond_families())
def test_chsh_report_bounds(cond):
    report = chsh(cond)
    assert all(abs(e) <= 1 for e in report.correlations.values())
    assert all(abs(s) <= 4 for s in report.s_values.values())


@given(product_families())
def test_product_family_never_signals(cond):
    assert no_signalling(cond).max_delta == 0


def test_no_signalling_detects_signalling(signalling_family):
    report = no_signalling(signalling_family)
    assert report.delta_a[1, 1] == 1
    assert report.max_delta == 1
    assert report.signalling


def test_pr_box_is_non_signalling(pr_box):
    # every one of the eight single-party marginals is uniform
    for a, b in SETTING_PAIRS:
        for v in (-1, 1):
            assert sum(pr_box[a, b][v, y] for y in (-1, 1)) == Fraction(1, 2)
            assert sum(pr_box[a, b][x, v] for x in (-1, 1)) == Fraction(1, 2)
    assert no_signalling(pr_box).max_delta == 0


@given(cond_families())
def test_no_signalling_deltas_in_unit_interval(cond):
    report = no_signalling(cond)
    assert all(0 <= d <= 1 for d in [*report.delta_a.values(), *report.delta_b.values()])


def test_row_identity_exhaustive():
    for row in itertools.product((-1, 1), repeat=4):
        values = row_values(row)
        assert len(values) == 4
        assert set(values.values()) <= {-2, 2}


def test_spreadsheet_single_rows():
    report = spreadsheet_chsh(Spreadsheet([(1, 1, 1, 1)]))
    assert report.correlations == {pair: 1 for pair in SETTING_PAIRS}
    assert set(report.s_values.values()) == {2}
    report = spreadsheet_chsh(Spreadsheet([(1, -1, 1, -1)]))
    # x1y1 + x1y2 + x2y1 - x2y2 = 1 - 1 - 1 - 1
    assert report.s_values[2, 2] == -2


def test_random_sheet_respects_bound():
    gen = np.random.default_rng(7)
    sheet = Spreadsheet(gen.choice([-1, 1], size=(1000, 4)))
    report = spreadsheet_chsh(sheet)
    assert all(-2 <= s <= 2 for s in report.s_values.values())
    # exact rational means with the row count as denominator
    assert all(1000 % e.denominator == 0 for e in report.correlations.values())


def test_spreadsheet_means_are_exact():
    sheet = Spreadsheet([(1, 1, 1, 1), (1, 1, -1, 1), (-1, 1, 1, 1)])
    corr = spreadsheet_chsh(sheet).correlations
    assert corr[1, 1] == Fraction(-1, 3)
    assert corr[2, 2] == 1


def test_spreadsheet_validation():
    with pytest.raises(EmptySheet):
        Spreadsheet([])
    with pytest.raises(AlphabetViolation):
        Spreadsheet([(1, 0, 1, 1)])
    with pytest.raises(ValidationError):
        Spreadsheet([(1, 1, 1)])


def test_spreadsheet_csv_round_trip(tmp_path):
    rng = random.Random(3)
    sheet = Spreadsheet([[rng.choice((-1, 1)) for _ in range(4)] for _ in range(25)])
    path = tmp_path / "sheet.csv"
    sheet.to_csv(path)
    assert path.read_text().splitlines()[0] == "x1,x2,y1,y2"
    assert np.array_equal(Spreadsheet.from_csv(path).rows, sheet.rows)


def test_spreadsheet_csv_bad_header(tmp_path):
    path = tmp_path / "sheet.csv"
    path.write_text("a,b,c,d\n1,1,1,1\n")
    with pytest.raises(ValidationError):
        Spreadsheet.from_csv(path)


def test_chsh_of_coupling_examples():
    report = chsh_of_coupling(Coupling.point(DeterministicStrategy(1, 1, 1, 1)))
    assert set(report.s_values.values()) == {2}
    uniform = Coupling({q: Fraction(1, 16) for q in itertools.product((-1, 1), repeat=4)})
    assert all(e == 0 for e in chsh_of_coupling(uniform).correlations.values())


def test_chsh_of_coupling_two_point_mixture():
    a, b = DeterministicStrategy(1, 1, 1, 1), DeterministicStrategy(1, -1, 1, -1)
    half = Fraction(1, 2)
    report = chsh_of_coupling(Coupling({a: half, b: half}))
    # E_ab = 1/2 * x_a y_b (first) + 1/2 * x_a y_b (second), summed by hand
    expected = {(1, 1): half * 1 + half * 1, (1, 2): half * 1 + half * -1,
                (2, 1): half * 1 + half * -1, (2, 2): half * 1 + half * 1}
    assert report.correlations == expected
    assert report.s_values == {(1, 1): 0, (1, 2): 2, (2, 1): 2, (2, 2): 0}
