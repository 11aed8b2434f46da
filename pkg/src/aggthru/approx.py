"""Continuous (rounding-free) throughput model and its closed-form optimum.

Dropping the symbol ceiling, the MPDU padding and the 22 service/tail bits
turns the cycle throughput into a smooth function of the MPDU count ``x``
and the per-MPDU MSDU count ``y``.  On a lossy channel, constraining the
PPDU to fill the whole transmission-time budget leaves a unimodal function
of ``x`` alone, whose maximizer is the positive root of a quadratic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .exact import success_probability
from .geometry import MsduSlot, padded_msdu_len, y_max
from .params import (
    DEFAULT_OVERHEAD,
    OverheadConfig,
    ProtocolConfig,
    cycle_overhead,
    phy_rate,
)


@dataclass(frozen=True)
class ContinuousScenario:
    """Inputs of the continuous model; real-valued x and y are first-class."""

    rate: float            # PHY rate [Mbps == bits/us]
    ber: float
    msdu_len: int          # payload bytes
    padded_len: int        # subheader + payload, 4-byte aligned [bytes]
    t_limit: float         # PPDU time limit [us]
    preamble: float        # [us]
    o_m_bits: int          # per-MPDU MAC overhead [bits]
    cycle_overhead: float  # fixed per-cycle airtime [us]

    def __post_init__(self):
        if not 0.0 <= self.ber < 1.0:
            raise ValueError(f"bit error rate must lie in [0, 1), got {self.ber}")
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    @property
    def budget_bits(self) -> float:
        """Bits the PHY can move in the post-preamble time budget."""
        return self.rate * (self.t_limit - self.preamble)

    @classmethod
    def from_config(
        cls,
        config: ProtocolConfig,
        overhead: OverheadConfig = DEFAULT_OVERHEAD,
        *,
        ber: float,
        msdu_len: int,
        mcs: Optional[int] = None,
        rate: Optional[float] = None,
    ) -> "ContinuousScenario":
        if (mcs is None) == (rate is None):
            raise ValueError("give exactly one of mcs or rate")
        if rate is None:
            rate = phy_rate(config, mcs)
        return cls(
            rate=rate,
            ber=ber,
            msdu_len=msdu_len,
            padded_len=padded_msdu_len(msdu_len, overhead),
            t_limit=config.ppdu_time_limit,
            preamble=config.preamble,
            o_m_bits=8 * overhead.mpdu_overhead_bytes,
            cycle_overhead=cycle_overhead(config, overhead),
        )


def throughput_approx(x: float, y: float, scenario: ContinuousScenario) -> float:
    """Continuous cycle throughput for ``x`` MPDUs of ``y`` MSDUs each [Mbps]."""
    mpdu_bits = scenario.o_m_bits + 8.0 * y * scenario.padded_len
    p = success_probability(scenario.ber, mpdu_bits)
    good = 8.0 * x * y * scenario.msdu_len * p
    air = scenario.cycle_overhead + x * mpdu_bits / scenario.rate
    return good / air


def y_from_x(x: float, scenario: ContinuousScenario) -> float:
    """MSDU count per MPDU that makes ``x`` MPDUs fill the time budget exactly."""
    spare = scenario.budget_bits - x * scenario.o_m_bits
    if spare < 0:
        raise ValueError("x alone exceeds the airtime budget")
    return spare / (x * 8.0 * scenario.padded_len)


def throughput_on_budget(x: float, scenario: ContinuousScenario) -> float:
    """Continuous throughput of ``x`` budget-filling MPDUs [Mbps].

    Equals ``throughput_approx(x, y_from_x(x))``; the airtime is constant
    because every such plan spends the whole time budget.
    """
    y = y_from_x(x, scenario)
    mpdu_bits = scenario.o_m_bits + 8.0 * y * scenario.padded_len
    p = success_probability(scenario.ber, mpdu_bits)
    good = 8.0 * x * y * scenario.msdu_len * p
    return good / (scenario.cycle_overhead - scenario.preamble + scenario.t_limit)


def x_opt_coefficient(
    ber: float,
    o_m_bits: int = 8 * DEFAULT_OVERHEAD.mpdu_overhead_bytes,
    t_limit: float = 5400.0,
    preamble: float = 64.8,
) -> float:
    """Optimal MPDU count per Mbps of PHY rate, for a lossy channel.

    With a = per-MPDU overhead bits, b = ln(1 - BER) and D = R (T - Pr),
    the budget-filling throughput peaks at X = (b D / 2)(1 - sqrt(1 - 4/(a b))),
    the positive root of a X^2 - a b D X + b D^2 = 0.  X is proportional
    to R, so the coefficient X/R depends only on BER, overhead and budget.
    """
    if ber <= 0.0:
        raise ValueError("use reliable-channel crossover instead")
    if ber >= 1.0:
        raise ValueError(f"bit error rate must lie in [0, 1), got {ber}")
    a = float(o_m_bits)
    b = math.log1p(-ber)
    span = t_limit - preamble
    return (b * span / 2.0) * (1.0 - math.sqrt(1.0 - 4.0 / (a * b)))


def x_opt_closed_form(scenario: ContinuousScenario) -> float:
    """MPDU count maximizing the budget-filling throughput (real-valued)."""
    return scenario.rate * x_opt_coefficient(
        scenario.ber, scenario.o_m_bits, scenario.t_limit, scenario.preamble
    )


def smallest_mcs_at_least(config: ProtocolConfig, rate_threshold: float) -> Optional[int]:
    """Smallest MCS index whose PHY rate reaches the threshold, if any."""
    for index, rate in enumerate(config.mcs_rates):
        if rate >= rate_threshold:
            return index
    return None


class ReliableCrossover(NamedTuple):
    discrete: float     # Mbps, Y capped at its integral maximum
    continuous: float   # Mbps, MPDU filled to the byte cap exactly


def crossover_rate_reliable(
    msdu_len: int,
    overhead: OverheadConfig,
    config: ProtocolConfig,
    *,
    window: int = 64,
) -> ReliableCrossover:
    """Largest PHY rate at which ``window`` full MPDUs still fill the time budget.

    On an error-free channel every MPDU carries as many MSDUs as fit, so
    beyond this rate a larger acknowledgment window starts to pay off.  The
    continuous variant ignores the integrality of the per-MPDU MSDU count
    and is independent of the MSDU size.
    """
    msdu = MsduSlot.for_payload(msdu_len, overhead)
    ym = y_max(msdu, overhead, config)
    om = overhead.mpdu_overhead_bytes
    span = config.ppdu_time_limit - config.preamble
    discrete = 8.0 * window * (om + ym * msdu.padded_len) / span
    continuous = 8.0 * window * config.max_mpdu_bytes / span
    return ReliableCrossover(discrete, continuous)


@dataclass(frozen=True)
class CrossoverReport:
    """Where the optimal MPDU count outgrows a ``window``-frame ack window."""

    ber: float
    x_opt_coefficient: float      # optimal MPDUs per Mbps
    rate_threshold: float         # Mbps where the optimum hits the window
    mcs_crossover: Optional[int]  # smallest MCS at or above the threshold


def crossover_mcs(
    ber: float,
    overhead: OverheadConfig,
    config: ProtocolConfig,
    *,
    window: int = 64,
) -> CrossoverReport:
    """Rate and MCS from which the optimum needs more than ``window`` MPDUs."""
    coefficient = x_opt_coefficient(
        ber,
        8 * overhead.mpdu_overhead_bytes,
        config.ppdu_time_limit,
        config.preamble,
    )
    threshold = window / coefficient
    return CrossoverReport(
        ber=ber,
        x_opt_coefficient=coefficient,
        rate_threshold=threshold,
        mcs_crossover=smallest_mcs_at_least(config, threshold),
    )
