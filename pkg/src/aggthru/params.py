"""Protocol, channel and overhead constants for the aggregation model.

Durations are microseconds, sizes bytes and PHY rates Mbps unless a name
says otherwise.  Mbps and bits/us are the same unit, which keeps all the
airtime arithmetic free of conversion factors.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, fields, replace
from typing import Mapping, Optional


class UnsupportedMcsError(ValueError):
    """The MCS index has no PHY rate for the selected protocol."""


class ProtocolFlavor(enum.Enum):
    """802.11ac, or 802.11ax with a 64- or 256-frame acknowledgment window."""

    AC64 = "ac64"
    AX64 = "ax64"
    AX256 = "ax256"

    @classmethod
    def parse(cls, name: str) -> "ProtocolFlavor":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown protocol flavor {name!r}; expected one of "
                f"{', '.join(f.value for f in cls)}"
            ) from None


# PHY rates for a 160 MHz channel, 4 spatial streams, 0.8 us guard interval.
AC_MCS_RATES = (234.0, 468.0, 702.0, 936.0, 1404.0, 1872.0, 2106.0, 2340.0, 2808.0, 3120.0)
AX_MCS_RATES = (288.0, 576.0, 864.0, 1152.0, 1729.0, 2305.0, 2594.0, 2882.0, 3458.0, 3843.0, 4323.0, 4803.0)


@dataclass(frozen=True)
class ProtocolConfig:
    """Per-flavor PHY/MAC constants."""

    flavor: ProtocolFlavor
    symbol_time: float            # OFDM symbol incl. guard interval [us]
    preamble: float               # PHY preamble [us]
    spatial_streams: int
    guard_interval: float         # [us]
    max_mpdus: int                # A-MPDU frame-count cap (ack window size)
    max_mpdu_bytes: int
    max_psdu_bytes: Optional[int]  # None = no A-MPDU byte cap
    ppdu_time_limit: float        # preamble + data symbols [us]
    back_duration: float          # block-ack frame airtime [us]
    mcs_rates: tuple              # Mbps, indexed by MCS

    def __post_init__(self):
        if not self.mcs_rates:
            raise ValueError("mcs_rates must not be empty")
        if any(b <= a for a, b in zip(self.mcs_rates, self.mcs_rates[1:])):
            raise ValueError("mcs_rates must be strictly increasing")
        for name in ("symbol_time", "preamble", "guard_interval", "ppdu_time_limit", "back_duration"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.max_mpdus < 1 or self.max_mpdu_bytes < 1:
            raise ValueError("max_mpdus and max_mpdu_bytes must be >= 1")

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["flavor"] = self.flavor.value
        out["mcs_rates"] = list(self.mcs_rates)
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "ProtocolConfig":
        kw = dict(data)
        kw["flavor"] = ProtocolFlavor(kw["flavor"])
        kw["mcs_rates"] = tuple(kw["mcs_rates"])
        return cls(**kw)


@dataclass(frozen=True)
class OverheadConfig:
    """Per-cycle time overheads and per-MPDU/MSDU byte overheads.

    AIFS, mean backoff and SIFS carry conventional EDCA best-effort values
    (SIFS 16 us, AIFS = SIFS + 2 slots, mean backoff 7.5 slots of 9 us);
    all are configurable and none of the published crossover figures
    depend on them.
    """

    aifs: float = 34.0            # [us]
    backoff: float = 67.5         # mean random backoff [us]
    sifs: float = 16.0            # [us]
    mpdu_delimiter: int = 4       # bytes
    mac_header: int = 28          # bytes
    fcs: int = 4                  # bytes
    msdu_subheader: int = 14      # bytes
    service_tail_bits: int = 22   # SERVICE + TAIL added to every PPDU

    def __post_init__(self):
        for name in ("aifs", "backoff", "sifs"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("mpdu_delimiter", "mac_header", "fcs", "msdu_subheader", "service_tail_bits"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def mpdu_overhead_bytes(self) -> int:
        """Per-MPDU byte overhead: delimiter + MAC header + FCS."""
        return self.mpdu_delimiter + self.mac_header + self.fcs


DEFAULT_OVERHEAD = OverheadConfig()

# The 11ax preamble exceeds the 11ac one by one long-training field per
# spatial stream: S * (7.2 - 4.0) us.  With S = 4 that puts the 11ac
# preamble at 64.8 - 12.8 = 52.0 us.
_AX_PREAMBLE = 64.8
_AC_PREAMBLE = 52.0


def default_config(flavor: ProtocolFlavor) -> ProtocolConfig:
    """Baseline configuration: 160 MHz, 4 spatial streams, 0.8 us GI."""
    if flavor is ProtocolFlavor.AC64:
        return ProtocolConfig(
            flavor=flavor,
            symbol_time=4.0,
            preamble=_AC_PREAMBLE,
            spatial_streams=4,
            guard_interval=0.8,
            max_mpdus=64,
            max_mpdu_bytes=11454,
            max_psdu_bytes=1048575,
            ppdu_time_limit=5400.0,
            back_duration=31.0,
            mcs_rates=AC_MCS_RATES,
        )
    if flavor is ProtocolFlavor.AX64:
        return ProtocolConfig(
            flavor=flavor,
            symbol_time=13.6,
            preamble=_AX_PREAMBLE,
            spatial_streams=4,
            guard_interval=0.8,
            max_mpdus=64,
            max_mpdu_bytes=11454,
            max_psdu_bytes=None,
            ppdu_time_limit=5400.0,
            back_duration=31.0,
            mcs_rates=AX_MCS_RATES,
        )
    if flavor is ProtocolFlavor.AX256:
        return ProtocolConfig(
            flavor=flavor,
            symbol_time=13.6,
            preamble=_AX_PREAMBLE,
            spatial_streams=4,
            guard_interval=0.8,
            max_mpdus=256,
            max_mpdu_bytes=11454,
            max_psdu_bytes=None,
            ppdu_time_limit=5400.0,
            back_duration=39.0,
            mcs_rates=AX_MCS_RATES,
        )
    raise ValueError(f"unknown flavor: {flavor!r}")


def phy_rate(config: ProtocolConfig, mcs: int) -> float:
    """PHY rate in Mbps (== bits/us) for an MCS index."""
    if not 0 <= mcs < len(config.mcs_rates):
        raise UnsupportedMcsError(
            f"unsupported MCS {mcs} for protocol {config.flavor.value}"
        )
    return config.mcs_rates[mcs]


def cycle_overhead(config: ProtocolConfig, overhead: OverheadConfig = DEFAULT_OVERHEAD) -> float:
    """Fixed per-cycle airtime: AIFS + backoff + preamble + SIFS + block ack [us]."""
    return overhead.aifs + overhead.backoff + config.preamble + overhead.sifs + config.back_duration


@dataclass(frozen=True)
class Scenario:
    """One evaluation point: protocol flavor, MCS, channel BER, MSDU payload size."""

    flavor: ProtocolFlavor
    mcs: int
    ber: float
    msdu_len: int

    def __post_init__(self):
        if not 0.0 <= self.ber < 1.0:
            raise ValueError(f"bit error rate must lie in [0, 1), got {self.ber}")
        if self.msdu_len < 1:
            raise ValueError("msdu_len must be >= 1 byte")
        if self.mcs < 0:
            raise ValueError("mcs must be >= 0")


# ---------------------------------------------------------------------------
# Flat key=value configuration overrides (see README for the file format).

_PROTOCOL_FLOAT_FIELDS = ("symbol_time", "preamble", "guard_interval", "ppdu_time_limit", "back_duration")
_PROTOCOL_INT_FIELDS = ("spatial_streams", "max_mpdus", "max_mpdu_bytes")
_OVERHEAD_FLOAT_FIELDS = ("aifs", "backoff", "sifs")
_OVERHEAD_INT_FIELDS = ("mpdu_delimiter", "mac_header", "fcs", "msdu_subheader", "service_tail_bits")


def parse_override_text(text: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_override_file(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_override_text(fh.read())


def _coerce(key: str, value, kind):
    if not isinstance(value, str):
        return kind(value)
    try:
        return kind(float(value)) if kind is int else kind(value)
    except ValueError:
        raise ValueError(f"invalid value for {key}: {value!r}") from None


def apply_overrides(
    config: ProtocolConfig,
    overhead: OverheadConfig,
    overrides: Mapping,
) -> tuple[ProtocolConfig, OverheadConfig]:
    """Apply flat overrides to a protocol config and an overhead config.

    Every numeric field of either dataclass can be overridden by name;
    `mcs_rates` accepts a comma-separated list and `max_psdu_bytes` accepts
    `none` for no cap.  Unknown keys are rejected.
    """
    cfg_kw: dict = {}
    ovh_kw: dict = {}
    for key, value in overrides.items():
        if key in _PROTOCOL_FLOAT_FIELDS:
            cfg_kw[key] = _coerce(key, value, float)
        elif key in _PROTOCOL_INT_FIELDS:
            cfg_kw[key] = _coerce(key, value, int)
        elif key == "max_psdu_bytes":
            if isinstance(value, str) and value.lower() in ("none", "unlimited", ""):
                cfg_kw[key] = None
            else:
                cfg_kw[key] = _coerce(key, value, int) if value is not None else None
        elif key == "mcs_rates":
            if isinstance(value, str):
                cfg_kw[key] = tuple(float(v) for v in value.split(",") if v.strip())
            else:
                cfg_kw[key] = tuple(float(v) for v in value)
        elif key in _OVERHEAD_FLOAT_FIELDS:
            ovh_kw[key] = _coerce(key, value, float)
        elif key in _OVERHEAD_INT_FIELDS:
            ovh_kw[key] = _coerce(key, value, int)
        else:
            raise ValueError(f"unknown configuration key: {key}")
    if cfg_kw:
        config = replace(config, **cfg_kw)
    if ovh_kw:
        overhead = replace(overhead, **ovh_kw)
    return config, overhead
