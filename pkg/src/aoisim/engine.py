"""Beacon-synchronized slotted simulation loop.

Each time slot is split into two transmission slots: status updates go
out in the first, the access point's feedback comes back in the second,
so a device learns the slot's outcome before the next slot starts.  A
beacon event marks the timing reference every ``beacon_interval_slots``
slots (synchronization is ideal by default; ``run_with_drift`` models
oscillator drift between beacons).

Per slot: every device draws one uniform variate from its own stream
and applies its policy to its current age; radios hosting several
virtual devices stay silent when two or more of them activate at once
(internal collision); the channel resolves the surviving attempts; the
feedback names the delivered device, which resets its age to 1 while
everyone else increments.  A run is a pure function of
(config, master_seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .aoi import AoiTrace, DeviceState
from .channel import (
    ChannelModel,
    ChannelParams,
    OutcomeCause,
    TransmissionAttempt,
    resolve_slot,
)
from .protocols import Policy

_CHUNK = 1 << 16


class NetworkConfigError(ValueError):
    """Invalid or inconsistent simulation configuration."""


@dataclass(frozen=True)
class SlotSchedule:
    """Slot structure: status then feedback within each time slot, with
    beacon slots flagged every ``beacon_interval_slots``."""

    beacon_interval_slots: int = 100

    def __post_init__(self) -> None:
        if self.beacon_interval_slots < 1:
            raise NetworkConfigError("beacon interval must be >= 1 slot")

    def is_beacon_slot(self, t: int) -> bool:
        return (t - 1) % self.beacon_interval_slots == 0

    def beacon_number(self, t: int) -> int:
        return (t - 1) // self.beacon_interval_slots + 1


@dataclass(slots=True)
class SlotEvent:
    """One log record per slot."""

    slot: int
    beacon: bool
    transmitters: tuple[int, ...]
    internal_collision: tuple[int, ...]
    cause: OutcomeCause
    feedback_id: int | None

    def to_dict(self) -> dict:
        return {
            "slot": self.slot,
            "beacon": self.beacon,
            "transmitters": list(self.transmitters),
            "internal_collision": list(self.internal_collision),
            "cause": self.cause.value,
            "feedback_id": self.feedback_id,
        }


@dataclass
class NetworkConfig:
    """Declarative description of one simulation run.

    ``policies`` is either a single policy shared by all devices or one
    per device.  ``radios`` partitions device ids into radio groups for
    the virtual-device multiplexing mode; by default every device has
    its own radio.  Device ids are 1..n_devices.
    """

    n_devices: int
    policies: Policy | Sequence[Policy]
    horizon_slots: int
    channel: ChannelParams = field(default_factory=ChannelParams)
    beacon_interval_slots: int = 100
    radios: Sequence[Sequence[int]] | None = None
    received_power_db: float | Sequence[float] = 35.0
    master_seed: int = 0
    beacon_consumes_slot: bool = False
    feedback_loss_prob: float = 0.0
    record_events: bool = True

    def __post_init__(self) -> None:
        n = self.n_devices
        if n < 1:
            raise NetworkConfigError(f"n_devices must be >= 1, got {n}")
        if self.horizon_slots < 1:
            raise NetworkConfigError(
                f"horizon_slots must be >= 1, got {self.horizon_slots}"
            )
        if not 0.0 <= self.feedback_loss_prob < 1.0:
            raise NetworkConfigError("feedback_loss_prob must be in [0, 1)")

        pols = self.policies
        if not isinstance(pols, Sequence):
            pols = (pols,) * n
        if len(pols) != n:
            raise NetworkConfigError(
                f"expected {n} policies, got {len(pols)}"
            )
        self.policies = tuple(pols)

        powers = self.received_power_db
        if isinstance(powers, (int, float)):
            powers = (float(powers),) * n
        if len(powers) != n:
            raise NetworkConfigError(
                f"expected {n} received powers, got {len(powers)}"
            )
        self.received_power_db = tuple(float(x) for x in powers)

        radios = self.radios
        if radios is None:
            radios = tuple((d,) for d in range(1, n + 1))
        radios = tuple(tuple(int(d) for d in group) for group in radios)
        flat = sorted(d for group in radios for d in group)
        if flat != list(range(1, n + 1)):
            raise NetworkConfigError(
                "radios must partition device ids 1..n exactly, got "
                f"{radios}"
            )
        if any(len(g) == 0 for g in radios):
            raise NetworkConfigError("empty radio group")
        self.radios = radios

        self.schedule = SlotSchedule(self.beacon_interval_slots)

    def device_states(self) -> list[DeviceState]:
        """Initial per-device states (age 1 at slot 1, one stream each)."""
        return [
            DeviceState(device_id=d, age=1, policy=self.policies[d - 1],
                        rng_stream=d - 1)
            for d in range(1, self.n_devices + 1)
        ]


@dataclass
class SimulationResult:
    trace: AoiTrace
    events: list[SlotEvent] | None
    master_seed: int


@dataclass
class SyncReport:
    """Drift bookkeeping: worst accumulated slot-boundary offset per
    radio (in units of one transmission slot) and how many slots had a
    transmission voided by misalignment."""

    max_offset_by_radio: tuple[float, ...]
    misaligned_slots: int


def _spawn_generators(config: NetworkConfig):
    """Independent seeded streams: one per device plus one for the channel."""
    ss = np.random.SeedSequence(config.master_seed)
    children = ss.spawn(config.n_devices + 1)
    device_gens = [np.random.Generator(np.random.PCG64(c)) for c in children[:-1]]
    channel_gen = np.random.Generator(np.random.PCG64(children[-1]))
    return device_gens, channel_gen


def run(config: NetworkConfig) -> SimulationResult:
    """Simulate the configured network over its horizon.

    The returned trace records each device's age at the start of every
    slot (the value its transmit decision used)."""
    return _run(config, drift_rates=None)[0]


def run_with_drift(
    config: NetworkConfig, drift_ppm: float | Sequence[float]
) -> tuple[SimulationResult, SyncReport]:
    """Simulate with per-radio oscillator drift between beacons.

    Each radio's local slot boundary drifts linearly by
    ``drift_ppm * 1e-6`` slots per slot and snaps back to the reference
    at every beacon.  Configurations whose accumulated offset would
    reach half a transmission slot before the next beacon are rejected,
    since such transmissions would straddle slot boundaries.
    """
    n_radios = len(config.radios)
    if isinstance(drift_ppm, (int, float)):
        rates = (float(drift_ppm) * 1e-6,) * n_radios
    else:
        if len(drift_ppm) != n_radios:
            raise NetworkConfigError(
                f"expected {n_radios} drift values, got {len(drift_ppm)}"
            )
        rates = tuple(float(x) * 1e-6 for x in drift_ppm)

    worst = (config.beacon_interval_slots - 1) * max(abs(r) for r in rates)
    if worst >= 0.5:
        raise NetworkConfigError(
            f"drift too large: accumulated offset reaches {worst:.4f} slots "
            "before the next beacon (>= 0.5, transmissions would misalign)"
        )
    return _run(config, drift_rates=rates)


def _run(
    config: NetworkConfig, drift_rates: tuple[float, ...] | None
) -> tuple[SimulationResult, SyncReport]:
    n = config.n_devices
    T = config.horizon_slots
    params = config.channel
    schedule = config.schedule
    interval = config.beacon_interval_slots

    deltas = np.array([pol.delta for pol in config.policies], dtype=np.int64)
    ps = np.array([pol.p for pol in config.policies])
    powers = np.array(config.received_power_db)

    radio_of = np.empty(n, dtype=np.intp)
    for r, group in enumerate(config.radios):
        for d in group:
            radio_of[d - 1] = r
    n_radios = len(config.radios)
    multiplexed = any(len(g) > 1 for g in config.radios)

    capture = params.model is ChannelModel.CAPTURE
    mprob = params.misdetection_prob
    loss = config.feedback_loss_prob

    device_gens, channel_gen = _spawn_generators(config)

    ages = np.ones(n, dtype=np.int64)
    buf = np.empty((T, n), dtype=np.int64)
    events: list[SlotEvent] | None = [] if config.record_events else None
    empty: tuple[int, ...] = ()
    misaligned_slots = 0

    done = 0
    while done < T:
        L = min(_CHUNK, T - done)
        U = np.column_stack([g.random(L) for g in device_gens])
        md = channel_gen.random(L)
        fb = channel_gen.random(L) if loss > 0.0 else None

        for i in range(L):
            t = done + i + 1
            buf[done + i] = ages
            beacon = schedule.is_beacon_slot(t)
            delivered: int | None = None
            cause = OutcomeCause.IDLE
            on_air_ids: tuple[int, ...] = empty
            blocked_ids: tuple[int, ...] = empty

            if not (beacon and config.beacon_consumes_slot):
                tx = (ages >= deltas) & (U[i] < ps)
                cand = np.flatnonzero(tx)
                if multiplexed and cand.size:
                    counts = np.bincount(radio_of[cand], minlength=n_radios)
                    per_cand = counts[radio_of[cand]]
                    on_air = cand[per_cand == 1]
                    blocked = cand[per_cand >= 2]
                    if blocked.size:
                        blocked_ids = tuple(int(d) + 1 for d in blocked)
                else:
                    on_air = cand

                k = on_air.size
                if k:
                    on_air_ids = tuple(int(d) + 1 for d in on_air)

                if drift_rates is not None and k:
                    offset = ((t - 1) % interval)
                    if any(
                        abs(offset * drift_rates[radio_of[d]]) >= 0.5
                        for d in on_air
                    ):
                        # Misaligned packet overlaps the neighboring slot:
                        # nothing in this slot is decodable.  Unreachable
                        # when the drift bound validation passed.
                        cause = OutcomeCause.COLLISION
                        misaligned_slots += 1
                        k = 0
                        on_air = on_air[:0]

                if capture:
                    attempts = [
                        TransmissionAttempt(int(d) + 1, float(powers[d]))
                        for d in on_air
                    ]
                    outcome = resolve_slot(attempts, params, float(md[i]))
                    delivered = outcome.delivered
                    cause = outcome.cause
                elif k == 1:
                    if md[i] < mprob:
                        cause = OutcomeCause.MISDETECTED
                    else:
                        delivered = int(on_air[0]) + 1
                        cause = OutcomeCause.SUCCESS
                elif k >= 2:
                    cause = OutcomeCause.COLLISION

            feedback_id = delivered
            if delivered is not None and fb is not None and fb[i] < loss:
                # Feedback lost: nobody resets, the AP's decode is moot.
                feedback_id = None

            ages += 1
            if feedback_id is not None:
                ages[feedback_id - 1] = 1

            if events is not None:
                events.append(
                    SlotEvent(t, beacon, on_air_ids, blocked_ids, cause,
                              feedback_id)
                )
        done += L

    trace = AoiTrace(ages=buf.T, device_ids=tuple(range(1, n + 1)))
    result = SimulationResult(trace=trace, events=events,
                              master_seed=config.master_seed)
    if drift_rates is None:
        report = SyncReport(max_offset_by_radio=(0.0,) * n_radios,
                            misaligned_slots=0)
    else:
        max_off = tuple(
            (interval - 1) * abs(r) if T >= interval else (T - 1) * abs(r)
            for r in drift_rates
        )
        report = SyncReport(max_offset_by_radio=max_off,
                            misaligned_slots=misaligned_slots)
    return result, report


def events_to_jsonl(events: Iterable[SlotEvent]) -> str:
    """Newline-delimited JSON, one object per slot (schema in README)."""
    return "\n".join(
        json.dumps(e.to_dict(), separators=(",", ":")) for e in events
    )


def write_event_log(events: Iterable[SlotEvent], fp: IO[str]) -> None:
    for e in events:
        fp.write(json.dumps(e.to_dict(), separators=(",", ":")))
        fp.write("\n")
