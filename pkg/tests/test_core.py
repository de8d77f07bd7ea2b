from datetime import date, datetime

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dcm.core import (DayContext, HourlyProfile, OptionMatrix, TargetHourSet, embed, runs,
                      top_x_hours, validate_day_context)
from oracles import day_context

D = date(2021, 7, 1)


def test_profile_is_read_only_and_indexed_by_day_and_hour():
    p = HourlyProfile(np.arange(48.0), D)
    assert p.start == datetime(2021, 7, 1)
    with pytest.raises(ValueError):
        p.values[0] = 5
    assert p.at(1, 3) == 27.0
    assert p.day(1).start == datetime(2021, 7, 2)
    assert p.n_days == 2
    with pytest.raises(IndexError):
        p.at(0, 24)
    assert p.equals(HourlyProfile(np.arange(48.0), D))


def test_zero_profiles_are_valid():
    ctx = day_context(np.zeros(24), np.zeros(24), np.zeros(24), day_prob=0.0)
    assert validate_day_context(ctx) == []


def test_short_forecast_gives_one_length_violation():
    good = day_context(np.zeros(24))
    ctx = DayContext(D, HourlyProfile(np.zeros(23), D), good.actual_load, good.temperature, 0.5,
                     np.zeros(24))
    v = validate_day_context(ctx)
    assert len(v) == 1 and v[0].field == "forecast_load" and "length" in v[0].rule


def test_day_probability_out_of_range():
    v = validate_day_context(day_context(np.zeros(24), day_prob=1.2))
    assert len(v) == 1 and v[0].field == "peak_day_probability"


def test_negative_load_and_bad_probabilities_are_reported():
    probs = np.zeros(24)
    probs[0] = 1.5
    v = validate_day_context(day_context(-np.ones(24), probs=probs))
    fields = {x.field for x in v}
    assert {"forecast_load", "actual_load", "peak_hour_probabilities"} <= fields


def test_top_x_examples():
    v = np.zeros(24)
    v[16], v[17] = 5, 6
    assert top_x_hours(v, 2).hours == (16, 17)
    assert top_x_hours(np.ones(24), 2).hours == (0, 1)
    w = np.zeros(24)
    w[19] = 1
    assert top_x_hours(w, 1).hours == (19,)
    with pytest.raises(ValueError):
        top_x_hours(v, 0)


@given(st.lists(st.integers(0, 5), min_size=24, max_size=24), st.integers(1, 24),
       st.integers(-1000, 1000))
def test_top_x_is_shift_invariant_and_breaks_ties_early(vals, x, c):
    vals = np.array(vals, dtype=float)
    got = top_x_hours(vals, x).hours
    assert got == top_x_hours(vals + c, x).hours
    ref = sorted(range(24), key=lambda h: (-vals[h], h))[:x]
    assert got == tuple(sorted(ref))


def test_target_hour_set_rules():
    with pytest.raises(ValueError):
        TargetHourSet((3, 3))
    with pytest.raises(ValueError):
        TargetHourSet((5, 3))
    with pytest.raises(ValueError):
        TargetHourSet((24,))
    with pytest.raises(ValueError):
        TargetHourSet((3, 5), horizonal=True)
    t = TargetHourSet((17, 18, 19), horizonal=True, payback_hour_appended=True, payback_hour=19)
    assert t.deployable == (17, 18)
    assert t.mask().sum() == 3


def test_option_matrix_validation():
    m = OptionMatrix((1, 2), [[0, 1, 0], [0, 0, 1]])
    assert m.n_options == 3 and m.zero_index == 0
    assert m.index_of([0, 1]) == 2
    with pytest.raises(KeyError):
        m.index_of([1, 1])
    with pytest.raises(ValueError):
        OptionMatrix((1, 2), [[0, 1, 1], [0, 0, 0]])  # duplicate columns
    with pytest.raises(ValueError):
        OptionMatrix((1, 2), [[1, 1], [0, 1]])  # no zero option
    with pytest.raises(ValueError):
        OptionMatrix((1,), [[0, 2]])


def test_runs_and_embed():
    assert runs([0, 1, 1, 0, 1]) == [(1, 2), (4, 4)]
    assert runs([]) == []
    e = embed((3, 5), np.array([1, 1]))
    assert e.sum() == 2 and e[3] == e[5] == 1
