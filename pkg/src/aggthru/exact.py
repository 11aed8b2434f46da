"""Exact cycle throughput, optimal-plan search, and a Monte Carlo cross-check.

The throughput of a plan is the expected MSDU payload delivered per cycle
divided by the cycle airtime; an MPDU of C bits survives the channel with
probability (1 - BER)^C.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    AggregationPlan,
    AirtimeBreakdown,
    Feasibility,
    MsduSlot,
    MsduTooLargeError,
    airtime,
    is_feasible,
    mpdu_bits,
    y_max,
)
from .params import (
    DEFAULT_OVERHEAD,
    OverheadConfig,
    ProtocolConfig,
    Scenario,
    cycle_overhead,
    phy_rate,
)


class InfeasiblePlanError(ValueError):
    """The plan violates a transmission limit."""

    def __init__(self, verdict: Feasibility):
        super().__init__(f"infeasible plan: {verdict.value} limit violated")
        self.verdict = verdict


class NoFeasiblePlanError(ValueError):
    """The scenario admits no transmission at all."""


def success_probability(ber: float, bits) -> float:
    """Probability that ``bits`` consecutive bits all arrive intact."""
    if ber == 0:
        return 1.0
    return math.exp(bits * math.log1p(-ber))


@dataclass(frozen=True)
class ThroughputResult:
    throughput: float              # Mbps
    plan: AggregationPlan
    airtime: AirtimeBreakdown
    goodput_bits_expected: float   # expected delivered payload bits per cycle


def throughput_exact(
    plan: AggregationPlan,
    scenario: Scenario,
    config: ProtocolConfig,
    overhead: OverheadConfig = DEFAULT_OVERHEAD,
    *,
    round_symbols: bool = True,
) -> ThroughputResult:
    """Expected throughput of a feasible plan [Mbps]."""
    verdict = is_feasible(plan, scenario, config, overhead, round_symbols=round_symbols)
    if not verdict.ok:
        raise InfeasiblePlanError(verdict)
    msdu = MsduSlot.for_payload(scenario.msdu_len, overhead)
    n = plan.n_extra
    c_lo = mpdu_bits(plan.y_base, msdu, overhead)
    v_lo = plan.y_base * success_probability(scenario.ber, c_lo)
    if n:
        c_hi = mpdu_bits(plan.y_base + 1, msdu, overhead)
        v_hi = (plan.y_base + 1) * success_probability(scenario.ber, c_hi)
    else:
        v_hi = 0.0
    good = (8.0 * scenario.msdu_len) * (n * v_hi + (plan.x - n) * v_lo)
    air = airtime(plan, scenario, config, overhead, round_symbols=round_symbols)
    return ThroughputResult(good / air.cycle_time, plan, air, good)


def _symbol_cap(config: ProtocolConfig) -> int:
    """Largest whole-symbol count whose PPDU still meets the time limit."""
    span = config.ppdu_time_limit - config.preamble
    cap = int(span // config.symbol_time)
    # settle boundary float effects against the same expression airtime() uses
    while config.preamble + (cap + 1) * config.symbol_time <= config.ppdu_time_limit:
        cap += 1
    while cap > 0 and config.preamble + cap * config.symbol_time > config.ppdu_time_limit:
        cap -= 1
    return cap


def _psdu_bits_budget(
    config: ProtocolConfig,
    rate: float,
    overhead: OverheadConfig,
    round_symbols: bool,
) -> int:
    """Largest PSDU bit count that passes the PPDU time check."""
    tail = overhead.service_tail_bits
    per_symbol = config.symbol_time * rate

    if round_symbols:
        s_cap = _symbol_cap(config)
        if s_cap < 1:
            return -1
        cand = int(s_cap * per_symbol) - tail

        def fits(bits: int) -> bool:
            return math.ceil((bits + tail) / per_symbol) <= s_cap

    else:
        cand = int(rate * (config.ppdu_time_limit - config.preamble)) - tail

        def fits(bits: int) -> bool:
            raw = (bits + tail) / per_symbol
            return config.preamble + raw * config.symbol_time <= config.ppdu_time_limit

    while cand >= 0 and not fits(cand):
        cand -= 1
    while fits(cand + 1):
        cand += 1
    return cand


def optimize_exact(
    scenario: Scenario,
    config: ProtocolConfig,
    overhead: OverheadConfig = DEFAULT_OVERHEAD,
    *,
    round_symbols: bool = True,
    chunk_pairs: int = 2_000_000,
) -> ThroughputResult:
    """Throughput-maximizing plan by exhaustive search.

    Searches every MPDU count ``x`` and every total MSDU count ``M`` with
    the balanced split (``M // x`` per MPDU, ``M % x`` MPDUs carrying one
    more), i.e. every plan whose per-MPDU counts differ by at most one.
    Ties break toward fewer MPDUs, then fewer MSDUs; the result does not
    depend on ``chunk_pairs``.
    """
    rate = phy_rate(config, scenario.mcs)
    msdu = MsduSlot.for_payload(scenario.msdu_len, overhead)
    try:
        ym = y_max(msdu, overhead, config)
    except MsduTooLargeError as exc:
        raise NoFeasiblePlanError("scenario admits no transmission") from exc

    om = overhead.mpdu_overhead_bytes
    leng = msdu.padded_len
    ts = config.symbol_time
    tail = overhead.service_tail_bits
    op = cycle_overhead(config, overhead)
    payload = scenario.msdu_len
    per_symbol = ts * rate

    bit_cap = _psdu_bits_budget(config, rate, overhead, round_symbols)
    if config.max_psdu_bytes is not None:
        bit_cap = min(bit_cap, 8 * config.max_psdu_bytes)

    # per-y tables; index ym+1 exists only so vectorized gathers stay in
    # bounds (it is always multiplied by a zero count)
    c_list = [mpdu_bits(y, msdu, overhead) for y in range(ym + 2)]
    c_table = np.array(c_list, dtype=np.int64)
    p_table = np.array([success_probability(scenario.ber, c) for c in c_list])
    v_table = np.arange(ym + 2) * p_table

    x_cap = min(config.max_mpdus, bit_cap // c_list[1]) if bit_cap >= c_list[1] else 0
    if x_cap < 1:
        raise NoFeasiblePlanError("scenario admits no transmission")

    xs_all = np.arange(1, x_cap + 1, dtype=np.int64)
    # M above this bound cannot fit the bit budget (per-MPDU bits are at
    # least 8*(O_M + y*Len)); the exact mask below settles the rest
    m_hi = np.minimum(xs_all * ym, (bit_cap // 8 - om * xs_all) // leng)
    # plans using at most half the budget are dominated by their doubled
    # copy whenever the doubled MPDU count is still allowed
    m_lo = np.maximum(xs_all, ((bit_cap // 2 - 24 * xs_all) // 8 - om * xs_all) // leng)
    m_lo = np.where(2 * xs_all <= config.max_mpdus, m_lo, xs_all)
    counts = m_hi - m_lo + 1

    keep = counts > 0
    xs_all, m_lo, counts = xs_all[keep], m_lo[keep], counts[keep]
    if xs_all.size == 0:
        raise NoFeasiblePlanError("scenario admits no transmission")
    cum = np.cumsum(counts)

    best_thr = -math.inf
    best_x = best_m = 0

    idx0 = 0
    while idx0 < xs_all.size:
        done = cum[idx0 - 1] if idx0 else 0
        idx1 = int(np.searchsorted(cum, done + chunk_pairs, side="left")) + 1
        idx1 = min(idx1, xs_all.size)

        counts_s = counts[idx0:idx1]
        xs_c = np.repeat(xs_all[idx0:idx1], counts_s)
        starts = np.concatenate(([0], np.cumsum(counts_s[:-1])))
        offs = np.arange(int(counts_s.sum())) - np.repeat(starts, counts_s)
        ms = offs + np.repeat(m_lo[idx0:idx1], counts_s)

        y = ms // xs_c
        n = ms - y * xs_c
        bits = (xs_c - n) * c_table[y] + n * c_table[y + 1]
        raw = (bits + tail) / per_symbol
        symbols = np.ceil(raw) if round_symbols else raw
        den = op + symbols * ts
        good = (8.0 * payload) * (n * v_table[y + 1] + (xs_c - n) * v_table[y])
        thr = np.where(bits <= bit_cap, good / den, -math.inf)

        j = int(np.argmax(thr))
        if thr[j] > best_thr:
            best_thr = float(thr[j])
            best_x = int(xs_c[j])
            best_m = int(ms[j])
        idx0 = idx1

    if not math.isfinite(best_thr):
        raise NoFeasiblePlanError("scenario admits no transmission")

    plan = AggregationPlan(best_x, best_m // best_x, best_m - best_x * (best_m // best_x))
    return throughput_exact(plan, scenario, config, overhead, round_symbols=round_symbols)


@dataclass(frozen=True)
class MonteCarloResult:
    throughput: float   # Mbps
    std_error: float    # standard error of the throughput estimate
    cycles: int
    seed: int


def simulate_throughput(
    plan: AggregationPlan,
    scenario: Scenario,
    config: ProtocolConfig,
    overhead: OverheadConfig = DEFAULT_OVERHEAD,
    *,
    cycles: int,
    seed: int,
) -> MonteCarloResult:
    """Simulate per-MPDU channel outcomes over repeated cycles.

    Each cycle draws every MPDU's fate independently (success probability
    (1 - BER)^C); MPDUs of equal size are drawn together as one binomial.
    Deterministic for a given seed.
    """
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    msdu = MsduSlot.for_payload(scenario.msdu_len, overhead)
    air = airtime(plan, scenario, config, overhead)
    rng = np.random.default_rng(seed)

    delivered = np.zeros(cycles, dtype=np.int64)
    for y, count in plan.mpdu_groups():
        p = success_probability(scenario.ber, mpdu_bits(y, msdu, overhead))
        successes = rng.binomial(count, p, size=cycles)
        delivered += successes * (8 * scenario.msdu_len * y)

    mean_bits = delivered.mean()
    thr = mean_bits / air.cycle_time
    if cycles > 1:
        se = delivered.std(ddof=1) / math.sqrt(cycles) / air.cycle_time
    else:
        se = 0.0
    return MonteCarloResult(float(thr), float(se), cycles, seed)


def monte_carlo_throughput(
    plan: AggregationPlan,
    scenario: Scenario,
    config: ProtocolConfig,
    overhead: OverheadConfig = DEFAULT_OVERHEAD,
    *,
    cycles: int,
    seed: int,
) -> float:
    """Simulated throughput in Mbps; see ``simulate_throughput``."""
    return simulate_throughput(
        plan, scenario, config, overhead, cycles=cycles, seed=seed
    ).throughput
