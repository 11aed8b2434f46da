"""Frame sizing and airtime arithmetic for two-level A-MPDU aggregation.

An A-MPDU carries ``x`` MPDUs; MPDU ``i`` carries ``y_i`` MSDUs.  Each MSDU
is prefixed by a subheader and padded to a 4-byte boundary, each MPDU adds
delimiter + MAC header + FCS and is itself padded to 4 bytes, and the whole
PSDU is sent as whole OFDM symbols after a fixed preamble.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .params import (
    DEFAULT_OVERHEAD,
    OverheadConfig,
    ProtocolConfig,
    Scenario,
    cycle_overhead,
    phy_rate,
)


class MsduTooLargeError(ValueError):
    """MSDU does not fit in one MPDU."""


def padded_msdu_len(payload_len: int, overhead: OverheadConfig = DEFAULT_OVERHEAD) -> int:
    """Subheader-prefixed MSDU size rounded up to a 4-byte boundary [bytes]."""
    raw = payload_len + overhead.msdu_subheader
    return 4 * ((raw + 3) // 4)


@dataclass(frozen=True)
class MsduSlot:
    """An MSDU payload together with its padded on-air size."""

    payload_len: int   # bytes handed to the MAC
    padded_len: int    # subheader + payload, 4-byte aligned

    @classmethod
    def for_payload(cls, payload_len: int, overhead: OverheadConfig = DEFAULT_OVERHEAD) -> "MsduSlot":
        return cls(payload_len, padded_msdu_len(payload_len, overhead))


def mpdu_bytes(y: int, msdu: MsduSlot, overhead: OverheadConfig = DEFAULT_OVERHEAD) -> int:
    """On-air size of one MPDU holding ``y`` MSDUs, 4-byte aligned [bytes]."""
    if y < 0:
        raise ValueError("y must be >= 0")
    raw = overhead.mpdu_overhead_bytes + y * msdu.padded_len
    return 4 * ((raw + 3) // 4)


def mpdu_bits(y: int, msdu: MsduSlot, overhead: OverheadConfig = DEFAULT_OVERHEAD) -> int:
    """On-air size of one MPDU holding ``y`` MSDUs [bits]."""
    return 8 * mpdu_bytes(y, msdu, overhead)


def y_max(msdu: MsduSlot, overhead: OverheadConfig, config: ProtocolConfig) -> int:
    """Largest MSDU count that keeps one MPDU within the MPDU byte cap."""
    budget = config.max_mpdu_bytes - overhead.mpdu_overhead_bytes
    if msdu.padded_len > budget:
        raise MsduTooLargeError(
            f"MSDU does not fit in one MPDU: {msdu.padded_len} padded bytes, "
            f"{budget} available"
        )
    return budget // msdu.padded_len


@dataclass(frozen=True)
class AggregationPlan:
    """``x`` MPDUs; ``n_extra`` of them carry ``y_base + 1`` MSDUs, the rest ``y_base``.

    Per-MPDU MSDU counts therefore differ by at most one.
    """

    x: int
    y_base: int
    n_extra: int = 0

    def __post_init__(self):
        if self.x < 1:
            raise ValueError("plan needs at least one MPDU")
        if not 0 <= self.n_extra < self.x:
            raise ValueError("n_extra must lie in [0, x)")
        if self.y_base < 0:
            raise ValueError("y_base must be >= 0")
        if self.y_base == 0 and self.n_extra == 0:
            raise ValueError("plan carries no MSDUs")

    @property
    def total_msdus(self) -> int:
        return self.x * self.y_base + self.n_extra

    def mpdu_groups(self) -> tuple:
        """(msdus_per_mpdu, mpdu_count) pairs with nonzero counts."""
        groups = []
        if self.n_extra:
            groups.append((self.y_base + 1, self.n_extra))
        if self.x - self.n_extra:
            groups.append((self.y_base, self.x - self.n_extra))
        return tuple(groups)


@dataclass(frozen=True)
class AirtimeBreakdown:
    """On-air accounting for one transmission cycle."""

    psdu_bits: int     # sum of all MPDU sizes
    symbols: float     # OFDM symbols (integral unless rounding disabled)
    data_time: float   # symbols * symbol_time [us]
    ppdu_time: float   # preamble + data_time [us]
    cycle_time: float  # per-cycle overhead + data_time [us]


class Feasibility(enum.Enum):
    """Verdict of the limit checks, in the order they are applied."""

    OK = "ok"
    TOO_MANY_MPDUS = "max_mpdus"
    MPDU_TOO_LARGE = "max_mpdu_bytes"
    PSDU_TOO_LARGE = "max_psdu_bytes"
    TIME_LIMIT_EXCEEDED = "ppdu_time_limit"

    @property
    def ok(self) -> bool:
        return self is Feasibility.OK


def _check_flavor(scenario: Scenario, config: ProtocolConfig) -> None:
    if scenario.flavor is not config.flavor:
        raise ValueError(
            f"scenario flavor {scenario.flavor.value} does not match "
            f"config flavor {config.flavor.value}"
        )


def plan_psdu_bits(plan: AggregationPlan, msdu: MsduSlot, overhead: OverheadConfig = DEFAULT_OVERHEAD) -> int:
    """Total PSDU size of a plan [bits]."""
    bits = (plan.x - plan.n_extra) * mpdu_bits(plan.y_base, msdu, overhead)
    if plan.n_extra:
        bits += plan.n_extra * mpdu_bits(plan.y_base + 1, msdu, overhead)
    return bits


def airtime(
    plan: AggregationPlan,
    scenario: Scenario,
    config: ProtocolConfig,
    overhead: OverheadConfig = DEFAULT_OVERHEAD,
    *,
    round_symbols: bool = True,
) -> AirtimeBreakdown:
    """Airtime of a plan; makes no feasibility judgment.

    ``round_symbols=False`` replaces the ceiling to whole OFDM symbols by
    exact division, which is the continuous approximation used to bound the
    rounding error.
    """
    _check_flavor(scenario, config)
    rate = phy_rate(config, scenario.mcs)
    msdu = MsduSlot.for_payload(scenario.msdu_len, overhead)
    bits = plan_psdu_bits(plan, msdu, overhead)
    raw = (bits + overhead.service_tail_bits) / (config.symbol_time * rate)
    symbols = float(math.ceil(raw)) if round_symbols else raw
    data_time = symbols * config.symbol_time
    return AirtimeBreakdown(
        psdu_bits=bits,
        symbols=symbols,
        data_time=data_time,
        ppdu_time=config.preamble + data_time,
        cycle_time=cycle_overhead(config, overhead) + data_time,
    )


def is_feasible(
    plan: AggregationPlan,
    scenario: Scenario,
    config: ProtocolConfig,
    overhead: OverheadConfig = DEFAULT_OVERHEAD,
    *,
    round_symbols: bool = True,
) -> Feasibility:
    """First violated transmission limit, or OK."""
    _check_flavor(scenario, config)
    if plan.x > config.max_mpdus:
        return Feasibility.TOO_MANY_MPDUS
    msdu = MsduSlot.for_payload(scenario.msdu_len, overhead)
    largest_y = plan.y_base + (1 if plan.n_extra else 0)
    if mpdu_bytes(largest_y, msdu, overhead) > config.max_mpdu_bytes:
        return Feasibility.MPDU_TOO_LARGE
    if config.max_psdu_bytes is not None:
        if plan_psdu_bits(plan, msdu, overhead) // 8 > config.max_psdu_bytes:
            return Feasibility.PSDU_TOO_LARGE
    air = airtime(plan, scenario, config, overhead, round_symbols=round_symbols)
    if air.ppdu_time > config.ppdu_time_limit:
        return Feasibility.TIME_LIMIT_EXCEEDED
    return Feasibility.OK
