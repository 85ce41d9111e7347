"""Closed-form per-pair power control and its brute-force grid oracle.

For one co-channel pair with gains (a, b, c, d), noise sigma2 and a per-user
rate floor r_min, the feasible power region in the (p2, p1) plane is the
wedge between the two rate-floor boundary lines

    floor-1:  p1 = p2*b*a' + a'*sigma2        (a' = (2**r_min - 1)/a)
    floor-2:  p1 = p2*c'/d - sigma2/d         (c' = c/(2**r_min - 1))

intersected with the box [0, p_max]^2.  The wedge apex (the junction, where
both floors hold with equality) exists in the first quadrant iff floor-1 has
the smaller slope; the pair is feasible iff the junction also lies in the
box.  The optimum is then searched over the junction, the two
junction/full-power mixes and the full-power corner, filtered by the
constraints.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ratemath import RatePair, pair_rates

# Strictness margin of the slope condition: parallel boundary lines are
# infeasible.
SLOPE_MARGIN = 1e-12
# Relative slack when filtering candidates, so points constructed to sit on a
# constraint boundary are not lost to rounding.
_FILTER_SLACK = 1e-12

CANDIDATE_JUNCTION = "junction"
CANDIDATE_JUNCTION_P2MAX = "junction_p2max"
CANDIDATE_P1MAX_JUNCTION = "p1max_junction"
CANDIDATE_BOTH_MAX = "both_max"
CANDIDATE_OFF = "off"
CANDIDATE_GRID = "grid"


@dataclass(frozen=True)
class DerivedCoefficients:
    """Rate-floor coefficients: a_prime = (2**r_min - 1)/a, c_prime = c/(2**r_min - 1)."""

    a_prime: float
    c_prime: float


@dataclass(frozen=True)
class JunctionPoint:
    """Intersection of the two rate-floor boundary lines in the power plane."""

    p11_b: float  # cell-1 user power at the junction, watts
    p12_b: float  # cell-2 user power at the junction, watts


@dataclass(frozen=True)
class QuadraticRoots:
    """A quadratic A*p^2 + B*p + C with its discriminant and real roots (ascending)."""

    coeffs: tuple
    discriminant: float
    roots: tuple

    def evaluate(self, p):
        """Value of the quadratic at p; its sign is the derivative's sign."""
        big_a, big_b, big_c = self.coeffs
        return (big_a * p + big_b) * p + big_c


@dataclass(frozen=True)
class PairAllocation:
    """Power-control outcome for one pair: off state, or powers plus rates."""

    feasible: bool
    p1: float
    p2: float
    rates: RatePair
    candidate_used: str


_OFF = PairAllocation(feasible=False, p1=0.0, p2=0.0, rates=RatePair(0.0, 0.0),
                      candidate_used=CANDIDATE_OFF)


def rate_floor_factor(r_min):
    """SINR threshold 2**r_min - 1 implied by the rate floor."""
    return 2.0 ** r_min - 1.0


def derived_coefficients(gains, r_min):
    """Floor coefficients for r_min > 0 (a zero floor is handled separately)."""
    t = rate_floor_factor(r_min)
    if t <= 0.0:
        raise ValueError(f"r_min must be positive with a representable 2**r_min - 1, got {r_min}")
    return DerivedCoefficients(a_prime=t / gains.a, c_prime=gains.c / t)


def check_feasible(gains, coeffs, sigma2, p_max):
    """Feasibility test of the pair problem.

    Returns (flag, junction).  The junction is returned whenever the slope
    condition holds, even if it violates the power box; it is None when the
    boundary lines do not cross in the first quadrant.
    """
    slope_low = gains.b * coeffs.a_prime
    slope_high = coeffs.c_prime / gains.d
    if not slope_low < slope_high * (1.0 - SLOPE_MARGIN):
        return False, None
    p12_b = (sigma2 / gains.d + coeffs.a_prime * sigma2) / (slope_high - slope_low)
    p11_b = p12_b * slope_high - sigma2 / gains.d
    junction = JunctionPoint(p11_b=p11_b, p12_b=p12_b)
    feasible = 0.0 <= p11_b <= p_max and 0.0 <= p12_b <= p_max
    return feasible, junction


def stationary_points_p1(gains, p2, sigma2):
    """Quadratic whose sign equals the sign of the pair sum-rate derivative in p1.

    Coefficients: A = a*d^2, B = 2*a*d*sigma2,
    C = a*sigma2^2 + p2*a*c*sigma2 - b*c*d*p2^2 - c*d*sigma2*p2.
    The leading coefficient is positive, so the derivative is negative only
    between the roots; the smaller root is always negative, hence on p >= 0
    the sum rate is decreasing-then-increasing or monotone increasing.
    """
    if p2 < 0:
        raise ValueError(f"p2 must be non-negative, got {p2}")
    a, b, c, d = gains.a, gains.b, gains.c, gains.d
    big_a = a * d * d
    big_b = 2.0 * a * d * sigma2
    big_c = (a * sigma2 * sigma2 + p2 * a * c * sigma2
             - b * c * d * p2 * p2 - c * d * sigma2 * p2)
    disc = big_b * big_b - 4.0 * big_a * big_c
    if disc > 0.0:
        # big_b > 0 always, so -(big_b + sqrt)/2 avoids cancellation
        q = -0.5 * (big_b + math.sqrt(disc))
        roots = tuple(sorted((q / big_a, big_c / q)))
    elif disc == 0.0:
        roots = (-big_b / (2.0 * big_a),)
    else:
        roots = ()
    return QuadraticRoots(coeffs=(big_a, big_b, big_c), discriminant=disc, roots=roots)


def _meets_constraints(gains, p1, p2, sigma2, p_max, t):
    """Box plus linearized rate floors, with a tiny relative slack."""
    if not (0.0 <= p1 <= p_max and 0.0 <= p2 <= p_max):
        return False
    if p1 * gains.a < t * (p2 * gains.b + sigma2) * (1.0 - _FILTER_SLACK):
        return False
    if p2 * gains.c < t * (p1 * gains.d + sigma2) * (1.0 - _FILTER_SLACK):
        return False
    return True


def _best_allocation(gains, sigma2, candidates):
    """Pick the candidate with the largest exact sum rate (ties: first listed)."""
    best = None
    best_sum = -math.inf
    for p1, p2, label in candidates:
        rates = pair_rates(gains, p1, p2, sigma2)
        total = rates.r1 + rates.r2
        if total > best_sum:
            best_sum = total
            best = PairAllocation(feasible=True, p1=p1, p2=p2, rates=rates, candidate_used=label)
    return best


def optimize_pair(gains, sigma2, p_max, r_min, extended_candidates=False):
    """Closed-form optimal power pair via the candidate-point search.

    Off state when infeasible.  Otherwise evaluates the junction, both
    junction/full-power mixes and the full-power corner, dropping candidates
    that violate the constraints (the junction satisfies them by
    construction), and returns the feasible candidate with the highest exact
    sum rate.  ``extended_candidates`` additionally scores the remaining
    vertices of the feasible polygon, where the floor boundary lines meet the
    full-power box edges.
    """
    t = rate_floor_factor(r_min)
    if t <= 0.0:
        # Zero rate floor: the floors are vacuous, the junction degenerates to
        # the origin and the candidate set is the four box corners.
        return _best_allocation(gains, sigma2, (
            (0.0, 0.0, CANDIDATE_JUNCTION),
            (0.0, p_max, CANDIDATE_JUNCTION_P2MAX),
            (p_max, 0.0, CANDIDATE_P1MAX_JUNCTION),
            (p_max, p_max, CANDIDATE_BOTH_MAX),
        ))
    coeffs = derived_coefficients(gains, r_min)
    feasible, junction = check_feasible(gains, coeffs, sigma2, p_max)
    if not feasible:
        return _OFF
    candidates = [(junction.p11_b, junction.p12_b, CANDIDATE_JUNCTION)]
    for p1, p2, label in (
        (junction.p11_b, p_max, CANDIDATE_JUNCTION_P2MAX),
        (p_max, junction.p12_b, CANDIDATE_P1MAX_JUNCTION),
        (p_max, p_max, CANDIDATE_BOTH_MAX),
    ):
        if _meets_constraints(gains, p1, p2, sigma2, p_max, t):
            candidates.append((p1, p2, label))
    if extended_candidates:
        slope_low = gains.b * coeffs.a_prime
        slope_high = coeffs.c_prime / gains.d
        edge_points = [
            (p_max * slope_low + coeffs.a_prime * sigma2, p_max, "floor1_at_p2max"),
            (p_max * slope_high - sigma2 / gains.d, p_max, "floor2_at_p2max"),
            (p_max, (p_max + sigma2 / gains.d) / slope_high, "floor2_at_p1max"),
        ]
        if slope_low > 0.0:
            edge_points.append(
                (p_max, (p_max - coeffs.a_prime * sigma2) / slope_low, "floor1_at_p1max")
            )
        for p1, p2, label in edge_points:
            if _meets_constraints(gains, p1, p2, sigma2, p_max, t):
                candidates.append((p1, p2, label))
    return _best_allocation(gains, sigma2, candidates)


def full_power_pair(gains, sigma2, p_max, r_min):
    """Full-power policy: both users at p_max, off if either misses the floor."""
    rates = pair_rates(gains, p_max, p_max, sigma2)
    if rates.r1 >= r_min and rates.r2 >= r_min:
        return PairAllocation(feasible=True, p1=p_max, p2=p_max, rates=rates,
                              candidate_used=CANDIDATE_BOTH_MAX)
    return _OFF

_GRID_CHUNK = 512


def _grid_masks(gains, sigma2, t, slack, p1_col, p2_row):
    ok1 = p1_col * gains.a >= t * (p2_row * gains.b + sigma2) - slack * gains.a
    ok2 = p2_row * gains.c >= t * (p1_col * gains.d + sigma2) - slack * gains.c
    return ok1 & ok2


def grid_oracle_pair(gains, sigma2, p_max, r_min, resolution, constraint_slack=0.0):
    """Brute-force power search over a resolution x resolution grid on the box.

    Maximizes the exact pair sum rate over grid points satisfying the rate
    floors (checked in their linearized form); off state if no grid point
    qualifies.  ``constraint_slack`` loosens (positive) or tightens
    (negative) the floors by that many watts, used to audit boundary-grazing
    disagreements.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    t = rate_floor_factor(r_min)
    grid = np.linspace(0.0, p_max, resolution)
    p2_row = grid[None, :]
    best_val = -math.inf
    best_idx = None
    for start in range(0, resolution, _GRID_CHUNK):
        p1_col = grid[start:start + _GRID_CHUNK, None]
        ok = _grid_masks(gains, sigma2, t, constraint_slack, p1_col, p2_row)
        if not ok.any():
            continue
        # one log is enough for the argmax: compare (1+sinr1)*(1+sinr2)
        prod = ((1.0 + p1_col * gains.a / (p2_row * gains.b + sigma2))
                * (1.0 + p2_row * gains.c / (p1_col * gains.d + sigma2)))
        prod[~ok] = 0.0
        flat = int(np.argmax(prod))
        val = float(prod.flat[flat])
        if val > best_val:
            best_val = val
            best_idx = (start + flat // resolution, flat % resolution)
    if best_idx is None:
        return _OFF
    p1 = float(grid[best_idx[0]])
    p2 = float(grid[best_idx[1]])
    return PairAllocation(feasible=True, p1=p1, p2=p2,
                          rates=pair_rates(gains, p1, p2, sigma2),
                          candidate_used=CANDIDATE_GRID)


def grid_feasible(gains, sigma2, p_max, r_min, resolution, constraint_slack=0.0):
    """Grid-restricted feasibility verdict: does any grid point meet the floors?

    Scans from high powers down, where feasible points concentrate.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    t = rate_floor_factor(r_min)
    grid = np.linspace(0.0, p_max, resolution)
    p2_row = grid[None, :]
    starts = list(range(0, resolution, _GRID_CHUNK))
    for start in reversed(starts):
        p1_col = grid[start:start + _GRID_CHUNK, None]
        if _grid_masks(gains, sigma2, t, constraint_slack, p1_col, p2_row).any():
            return True
    return False
