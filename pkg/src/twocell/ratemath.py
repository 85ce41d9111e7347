"""Exact and high-SINR-approximate rate math for users, pairs and the network.

All logarithms are base 2; rates are bits/s/Hz.
"""

import math
from dataclasses import dataclass

from .scenario import pair_gains


@dataclass(frozen=True)
class RatePair:
    """Rates of one co-channel pair: r1 for the cell-1 user, r2 for cell-2."""

    r1: float
    r2: float


def user_rate(p_own, g_direct, p_other, g_cross, sigma2):
    """Shannon rate with a single co-channel interferer.

    log2(1 + p_own*g_direct / (sigma2 + p_other*g_cross))
    """
    return math.log2(1.0 + p_own * g_direct / (sigma2 + p_other * g_cross))


def pair_rates(gains, p1, p2, sigma2):
    """Exact rates of both users of a pair at transmit powers (p1, p2)."""
    r1 = math.log2(1.0 + p1 * gains.a / (p2 * gains.b + sigma2))
    r2 = math.log2(1.0 + p2 * gains.c / (p1 * gains.d + sigma2))
    return RatePair(r1=r1, r2=r2)


def approx_user_rate(p_own, g_direct, p_other, g_cross):
    """High-SINR approximation log2(SIR), dropping the +1 and the noise.

    Computed as a single log of the ratio so that a common scaling of both
    powers cancels in the quotient (exact power-scaling invariance).
    """
    if p_own <= 0 or g_direct <= 0 or p_other <= 0 or g_cross <= 0:
        raise ValueError("approximation requires strictly positive powers and gains")
    return math.log2((p_own * g_direct) / (p_other * g_cross))


def approx_pair_sum_rate(gains):
    """Power-free approximate pair sum rate.

    (log2 a + log2 c) - (log2 d + log2 b): the direct gains are the benefit,
    the cross gains the cost; transmit powers cancel pairwise.
    """
    return (math.log2(gains.a) + math.log2(gains.c)) - (math.log2(gains.d) + math.log2(gains.b))


def network_sum_rate(realization, assignment, allocations, sigma2):
    """Exact network sum rate for one realization under per-pair allocations.

    ``allocations`` holds one power allocation per sub-channel (objects with
    ``feasible``, ``p1``, ``p2`` attributes, e.g. power.PairAllocation).
    Pairs flagged infeasible are in the off state and contribute 0.
    """
    n_sub = realization.num_subchannels
    if len(allocations) != n_sub:
        raise ValueError(f"expected {n_sub} allocations, got {len(allocations)}")
    total = 0.0
    for n, alloc in enumerate(allocations):
        if not alloc.feasible:
            continue
        rates = pair_rates(pair_gains(realization, assignment, n), alloc.p1, alloc.p2, sigma2)
        total += rates.r1 + rates.r2
    return total
