"""Single-slot reception models: pure collision, SINR capture, misdetection.

Resolves the set of simultaneous transmissions in one slot into at most
one delivery.  Powers are in dB on an arbitrary reference; only
differences matter for capture.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class ChannelModel(Enum):
    COLLISION_ONLY = "collision_only"
    CAPTURE = "capture"


class OutcomeCause(Enum):
    IDLE = "idle"
    SUCCESS = "success"
    COLLISION = "collision"
    CAPTURED = "captured"
    MISDETECTED = "misdetected"


@dataclass(frozen=True)
class TransmissionAttempt:
    device_id: int
    received_power_db: float = 35.0


@dataclass(frozen=True)
class ChannelOutcome:
    """Delivery result for one slot; ``delivered`` is set iff the cause
    is success or captured."""

    delivered: int | None
    cause: OutcomeCause


@dataclass(frozen=True)
class ChannelParams:
    model: ChannelModel = ChannelModel.COLLISION_ONLY
    sinr_threshold_db: float = 6.0
    noise_floor_db: float = -90.0
    misdetection_prob: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.misdetection_prob < 1.0:
            raise ValueError(
                f"misdetection_prob must be in [0, 1), got {self.misdetection_prob}"
            )


_IDLE = ChannelOutcome(None, OutcomeCause.IDLE)
_COLLISION = ChannelOutcome(None, OutcomeCause.COLLISION)
_MISDETECTED = ChannelOutcome(None, OutcomeCause.MISDETECTED)


def resolve_slot(
    attempts: Sequence[TransmissionAttempt],
    params: ChannelParams,
    draw: float,
) -> ChannelOutcome:
    """Resolve one slot's transmissions into a delivery outcome.

    ``draw`` is a uniform [0, 1) variate consumed by the misdetection
    decision; misdetection applies only to an otherwise-successful
    reception (a would-be delivery is dropped with probability
    ``misdetection_prob``).
    """
    if not attempts:
        return _IDLE
    ids = [a.device_id for a in attempts]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate device ids in attempts: {ids}")

    if params.model is ChannelModel.COLLISION_ONLY:
        if len(attempts) >= 2:
            return _COLLISION
        winner = attempts[0].device_id
        cause = OutcomeCause.SUCCESS
    else:
        winner_attempt = _capture_winner(attempts, params)
        if winner_attempt is None:
            return _COLLISION
        winner = winner_attempt.device_id
        cause = (
            OutcomeCause.SUCCESS if len(attempts) == 1 else OutcomeCause.CAPTURED
        )

    if draw < params.misdetection_prob:
        return _MISDETECTED
    return ChannelOutcome(winner, cause)


def _capture_winner(
    attempts: Sequence[TransmissionAttempt], params: ChannelParams
) -> TransmissionAttempt | None:
    """The unique attempt whose SINR clears the capture threshold, if any.

    SINR_i = P_i - 10 log10( sum_{j != i} 10^(P_j/10) + 10^(noise/10) ).
    """
    powers = np.array([a.received_power_db for a in attempts])
    linear = 10.0 ** (powers / 10.0)
    noise = 10.0 ** (params.noise_floor_db / 10.0)
    interference = linear.sum() + noise - linear
    sinr_db = powers - 10.0 * np.log10(interference)
    above = np.flatnonzero(sinr_db >= params.sinr_threshold_db)
    if above.size != 1:
        return None
    return attempts[int(above[0])]
