import math

import pytest
from hypothesis import given, strategies as st

from aoisim.channel import (
    ChannelModel,
    ChannelParams,
    OutcomeCause,
    TransmissionAttempt,
    resolve_slot,
)

COLLISION_ONLY = ChannelParams(model=ChannelModel.COLLISION_ONLY)
CAPTURE = ChannelParams(model=ChannelModel.CAPTURE, sinr_threshold_db=6.0,
                        noise_floor_db=-90.0)


def test_empty_slot_is_idle():
    out = resolve_slot([], COLLISION_ONLY, draw=0.0)
    assert out.cause is OutcomeCause.IDLE
    assert out.delivered is None


def test_single_attempt_succeeds():
    out = resolve_slot([TransmissionAttempt(3)], COLLISION_ONLY, draw=0.99)
    assert out.cause is OutcomeCause.SUCCESS
    assert out.delivered == 3


def test_two_equal_attempts_collide():
    attempts = [TransmissionAttempt(1, 35.0), TransmissionAttempt(2, 35.0)]
    out = resolve_slot(attempts, COLLISION_ONLY, draw=0.99)
    assert out.cause is OutcomeCause.COLLISION
    assert out.delivered is None


def test_capture_example_with_linear_domain_recheck():
    # 43 dB against 35 dB interference: recompute the SINR independently
    # in the linear power domain.
    strong, weak, noise, beta = 43.0, 35.0, -90.0, 6.0
    interference = 10 ** (weak / 10) + 10 ** (noise / 10)
    sinr_strong = strong - 10 * math.log10(interference)
    sinr_weak = weak - 10 * math.log10(10 ** (strong / 10) + 10 ** (noise / 10))
    assert sinr_strong >= beta
    assert sinr_weak < beta

    attempts = [TransmissionAttempt(1, strong), TransmissionAttempt(2, weak)]
    out = resolve_slot(attempts, CAPTURE, draw=0.99)
    assert out.cause is OutcomeCause.CAPTURED
    assert out.delivered == 1


def test_single_attempt_under_capture_is_plain_success():
    out = resolve_slot([TransmissionAttempt(5, 35.0)], CAPTURE, draw=0.99)
    assert out.cause is OutcomeCause.SUCCESS
    assert out.delivered == 5


def test_misdetection_drops_would_be_delivery():
    params = ChannelParams(misdetection_prob=0.02)
    hit = resolve_slot([TransmissionAttempt(1)], params, draw=0.0199)
    assert hit.cause is OutcomeCause.MISDETECTED
    assert hit.delivered is None
    miss = resolve_slot([TransmissionAttempt(1)], params, draw=0.02)
    assert miss.cause is OutcomeCause.SUCCESS


def test_misdetection_does_not_apply_to_collisions():
    params = ChannelParams(misdetection_prob=0.5)
    out = resolve_slot([TransmissionAttempt(1), TransmissionAttempt(2)], params, 0.0)
    assert out.cause is OutcomeCause.COLLISION


def test_duplicate_device_ids_rejected():
    with pytest.raises(ValueError):
        resolve_slot([TransmissionAttempt(1), TransmissionAttempt(1)],
                     COLLISION_ONLY, 0.5)


def test_zero_misdetection_collision_only_is_idealized_channel():
    params = ChannelParams(model=ChannelModel.COLLISION_ONLY, misdetection_prob=0.0)
    for k in (0, 1, 2, 5):
        attempts = [TransmissionAttempt(i + 1) for i in range(k)]
        out = resolve_slot(attempts, params, draw=0.0)
        if k == 0:
            assert out.cause is OutcomeCause.IDLE
        elif k == 1:
            assert out.delivered == 1 and out.cause is OutcomeCause.SUCCESS
        else:
            assert out.delivered is None and out.cause is OutcomeCause.COLLISION


@given(
    powers=st.lists(st.floats(min_value=-20, max_value=80), min_size=0, max_size=6),
    draw=st.floats(min_value=0, max_value=1, exclude_max=True),
    model=st.sampled_from(list(ChannelModel)),
)
def test_at_most_one_delivery(powers, draw, model):
    params = ChannelParams(model=model, misdetection_prob=0.1)
    attempts = [TransmissionAttempt(i + 1, pw) for i, pw in enumerate(powers)]
    out = resolve_slot(attempts, params, draw)
    if out.delivered is not None:
        assert out.cause in (OutcomeCause.SUCCESS, OutcomeCause.CAPTURED)
        assert out.delivered in [a.device_id for a in attempts]
    else:
        assert out.cause in (OutcomeCause.IDLE, OutcomeCause.COLLISION,
                             OutcomeCause.MISDETECTED)


@given(
    powers=st.lists(st.floats(min_value=-20, max_value=80), min_size=2, max_size=6),
)
def test_collision_only_ignores_powers(powers):
    attempts = [TransmissionAttempt(i + 1, pw) for i, pw in enumerate(powers)]
    out = resolve_slot(attempts, COLLISION_ONLY, 0.9)
    ref = resolve_slot(
        [TransmissionAttempt(a.device_id, 0.0) for a in attempts],
        COLLISION_ONLY, 0.9,
    )
    assert out == ref


@given(
    k=st.integers(min_value=2, max_value=8),
    power=st.floats(min_value=-20, max_value=80),
)
def test_equal_powers_never_capture(k, power):
    attempts = [TransmissionAttempt(i + 1, power) for i in range(k)]
    out = resolve_slot(attempts, CAPTURE, 0.9)
    assert out.cause is OutcomeCause.COLLISION


@given(
    base=st.lists(st.floats(min_value=0, max_value=60), min_size=1, max_size=5),
    boost=st.floats(min_value=0.0, max_value=40.0),
    draw=st.floats(min_value=0, max_value=1, exclude_max=True),
)
def test_raising_own_power_never_loses_delivery(base, boost, draw):
    params = ChannelParams(model=ChannelModel.CAPTURE, misdetection_prob=0.05)
    attempts = [TransmissionAttempt(i + 1, pw) for i, pw in enumerate(base)]
    before = resolve_slot(attempts, params, draw)
    if before.delivered is None:
        return
    target = before.delivered
    raised = [
        TransmissionAttempt(a.device_id,
                            a.received_power_db + (boost if a.device_id == target
                                                   else 0.0))
        for a in attempts
    ]
    after = resolve_slot(raised, params, draw)
    assert after.delivered == target
