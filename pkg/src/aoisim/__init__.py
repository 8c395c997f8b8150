"""Slot-accurate AoI simulator and analysis toolkit for slotted random access."""

from .aoi import (
    AgeValue,
    AoiTrace,
    DeviceState,
    SlotIndex,
    UnknownDeviceError,
    average_aoi,
    network_average_aoi,
    step_age,
)
from .channel import (
    ChannelModel,
    ChannelOutcome,
    ChannelParams,
    OutcomeCause,
    TransmissionAttempt,
    resolve_slot,
)
from .engine import (
    NetworkConfig,
    NetworkConfigError,
    SimulationResult,
    SlotEvent,
    SlotSchedule,
    SyncReport,
    events_to_jsonl,
    run,
    run_with_drift,
    write_event_log,
)
from .frames import (
    BROADCAST_ID,
    NO_FEEDBACK_ID,
    Beacon,
    CodecError,
    Feedback,
    Frame,
    FrameEncodeError,
    FrameFormatError,
    FrameIntegrityError,
    FrameLengthError,
    StatusUpdate,
    crc16_ccitt_false,
    decode,
    encode,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    ReportRow,
    e1_config,
    e2_config,
    e3_config,
    emit_csv,
    report_to_csv,
    run_custom,
    run_experiment_e1,
    run_experiment_e2,
    run_experiment_e3,
)
from .markov import TruncationError, exact_average_aoi_markov
from .protocols import (
    AdraPolicy,
    AiraPolicy,
    DivergentAoiError,
    FixedPointError,
    Policy,
    adra_average_aoi,
    adra_optimize_cap,
    adra_success_probability,
    aira_average_aoi,
    aira_optimal_cap,
    decide,
)

__version__ = "0.1.0"

__all__ = [
    "AgeValue", "AoiTrace", "DeviceState", "SlotIndex", "UnknownDeviceError",
    "average_aoi", "network_average_aoi", "step_age",
    "ChannelModel", "ChannelOutcome", "ChannelParams", "OutcomeCause",
    "TransmissionAttempt", "resolve_slot",
    "NetworkConfig", "NetworkConfigError", "SimulationResult", "SlotEvent",
    "SlotSchedule", "SyncReport", "events_to_jsonl", "run", "run_with_drift",
    "write_event_log",
    "BROADCAST_ID", "NO_FEEDBACK_ID", "Beacon", "CodecError", "Feedback",
    "Frame", "FrameEncodeError", "FrameFormatError", "FrameIntegrityError",
    "FrameLengthError", "StatusUpdate", "crc16_ccitt_false", "decode", "encode",
    "ExperimentConfig", "ExperimentReport", "ReportRow", "e1_config",
    "e2_config", "e3_config", "emit_csv", "report_to_csv", "run_custom",
    "run_experiment_e1", "run_experiment_e2", "run_experiment_e3",
    "TruncationError", "exact_average_aoi_markov",
    "AdraPolicy", "AiraPolicy", "DivergentAoiError", "FixedPointError",
    "Policy", "adra_average_aoi", "adra_optimize_cap",
    "adra_success_probability", "aira_average_aoi", "aira_optimal_cap",
    "decide",
]
