import numpy as np
import pytest
from hypothesis import given, strategies as st

from aoisim.aoi import (
    AoiTrace,
    UnknownDeviceError,
    average_aoi,
    network_average_aoi,
    step_age,
)


def test_step_age_reset():
    assert step_age(5, True) == 1


def test_step_age_increment():
    assert step_age(5, False) == 6


def test_step_age_increment_from_minimum():
    assert step_age(1, False) == 2


def test_step_age_rejects_invalid_age():
    with pytest.raises(ValueError):
        step_age(0, True)


@given(st.integers(min_value=1, max_value=10**6), st.booleans())
def test_step_age_two_branches(age, delivered):
    nxt = step_age(age, delivered)
    assert nxt in (1, age + 1)
    assert nxt >= 1


@given(st.lists(st.booleans(), min_size=1, max_size=500))
def test_age_chain_stays_valid(outcomes):
    age = 1
    for delivered in outcomes:
        prev = age
        age = step_age(age, delivered)
        assert age == (1 if delivered else prev + 1)


def _trace(rows):
    return AoiTrace(ages=np.array(rows, dtype=np.int64))


def test_average_aoi_simple_mean():
    assert average_aoi(_trace([[1, 2, 3, 1]]), 1) == pytest.approx(1.75)


def test_average_aoi_all_successes_lower_bound():
    assert average_aoi(_trace([[1] * 57]), 1) == 1.0


def test_average_aoi_no_successes_arithmetic_series():
    t = 100
    assert average_aoi(_trace([list(range(1, t + 1))]), 1) == pytest.approx(50.5)
    # zero successes from initial age 1 gives exactly (T+1)/2
    assert average_aoi(_trace([list(range(1, t + 1))]), 1) == (t + 1) / 2


def test_average_aoi_never_below_one():
    assert average_aoi(_trace([[1, 2, 1, 4, 5]]), 1) >= 1.0


def test_average_aoi_unknown_device():
    with pytest.raises(UnknownDeviceError):
        average_aoi(_trace([[1, 2]]), 99)


def test_network_average_is_mean_over_devices():
    trace = _trace([[2, 2, 2, 2], [4, 4, 4, 4]])
    assert average_aoi(trace, 1) == 2.0
    assert average_aoi(trace, 2) == 4.0
    assert network_average_aoi(trace) == 3.0


def test_network_average_single_device():
    trace = _trace([[1, 2, 3, 1]])
    assert network_average_aoi(trace) == average_aoi(trace, 1)


def test_trace_validation():
    with pytest.raises(ValueError):
        AoiTrace(ages=np.array([1, 2, 3]))  # not 2-D
    with pytest.raises(ValueError):
        AoiTrace(ages=np.array([[0, 1]]))  # age below 1
    with pytest.raises(ValueError):
        AoiTrace(ages=np.array([[1, 2], [1, 2]]), device_ids=(1, 1))


def test_trace_shape_accessors():
    trace = AoiTrace(ages=np.ones((3, 7), dtype=np.int64))
    assert trace.n_devices == 3
    assert trace.horizon == 7
    assert trace.device_ids == (1, 2, 3)
    assert trace.ages_for(2).shape == (7,)
