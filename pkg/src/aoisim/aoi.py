"""Core age-of-information types and metrics for slotted time.

Time is discrete: slots are indexed t = 1, 2, 3, ... and every status
update occupies exactly one slot.  A device's instantaneous AoI is the
number of slots since the generation time of its newest update received
at the access point; under generate-at-will with one-slot transmissions
it drops to 1 right after a successful delivery and grows by one per
slot otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

# Slot counter, starts at 1 and is strictly increasing within a run.
SlotIndex = int
# Instantaneous AoI in whole slots; always >= 1 after initialization.
AgeValue = int


class UnknownDeviceError(KeyError):
    """Raised when a trace is queried for a device it does not contain."""


def step_age(current: AgeValue, delivered: bool) -> AgeValue:
    """One-slot AoI evolution: reset to 1 on delivery, else increment.

    ``current`` must be >= 1 (AoI is never smaller than one slot).
    """
    if current < 1:
        raise ValueError(f"age must be >= 1, got {current}")
    return 1 if delivered else current + 1


@dataclass
class DeviceState:
    """Per-device simulation state.

    ``rng_stream`` identifies the device's independent pseudo-random
    stream within a run; the engine derives the actual generator from
    the run's master seed so that runs are pure functions of
    (config, seed).
    """

    device_id: int
    age: AgeValue = 1
    policy: Any = None
    rng_stream: int = 0


@dataclass(frozen=True)
class AoiTrace:
    """Per-slot AoI samples for every device over a finite horizon.

    ``ages[d, t-1]`` is device d's AoI at the start of slot t, i.e. the
    value the slot-t transmit decision sees.  The slot-T outcome only
    affects the (unrecorded) age at T+1.
    """

    ages: np.ndarray  # shape (n_devices, horizon), integer dtype
    device_ids: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        arr = np.asarray(self.ages)
        if arr.ndim != 2:
            raise ValueError(f"trace array must be 2-D, got shape {arr.shape}")
        ids = self.device_ids or tuple(range(1, arr.shape[0] + 1))
        object.__setattr__(self, "ages", arr)
        object.__setattr__(self, "device_ids", tuple(ids))
        if len(self.device_ids) != arr.shape[0]:
            raise ValueError("device_ids length does not match trace rows")
        if len(set(self.device_ids)) != len(self.device_ids):
            raise ValueError("device_ids must be unique")
        if arr.size and arr.min() < 1:
            raise ValueError("ages must all be >= 1")

    @property
    def horizon(self) -> SlotIndex:
        return int(self.ages.shape[1])

    @property
    def n_devices(self) -> int:
        return int(self.ages.shape[0])

    def ages_for(self, device_id: int) -> np.ndarray:
        try:
            row = self.device_ids.index(device_id)
        except ValueError:
            raise UnknownDeviceError(f"device {device_id} not in trace") from None
        return self.ages[row]


def average_aoi(trace: AoiTrace, device_id: int) -> float:
    """Finite-horizon time-average AoI of one device: (1/T) sum of ages."""
    ages = trace.ages_for(device_id)
    if ages.size == 0:
        raise ValueError("trace is empty")
    return float(ages.mean())


def network_average_aoi(trace: AoiTrace) -> float:
    """Unweighted mean of per-device average AoI over all devices."""
    if trace.ages.size == 0:
        raise ValueError("trace is empty")
    return float(trace.ages.mean())
