"""Sub-channel assignment: log-ratio cost matrices, Hungarian solver, baselines.

The per-cell cost of giving sub-channel n to user m is the log-ratio of the
user's direct gain to its cross gain on that sub-channel.  Because the
approximate pair sum rate separates into per-cell terms with per-cell
constraints only, each cell's assignment is an independent square problem.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .scenario import ASSIGNMENT_STREAM, pair_gains_for_users, trial_rng

MAX_MATRIX_SIZE = 64          # dense O(N^3) solver guard
DEFAULT_ENUMERATION_CAP = 5   # exhaustive search enumerates (N!)^2 candidates


@dataclass(frozen=True)
class CostMatrix:
    """Square per-cell cost matrix: rows are users, columns are sub-channels."""

    entries: np.ndarray
    cell: int  # 0 or 1


@dataclass(frozen=True)
class Assignment:
    """Per-cell bijection sub-channel -> user.

    ``users_by_subchannel[cell][subchannel]`` is the user index holding that
    sub-channel in that cell.  Each per-cell tuple is a permutation.
    """

    users_by_subchannel: tuple

    def __post_init__(self):
        for cell, users in enumerate(self.users_by_subchannel):
            if sorted(users) != list(range(len(users))):
                raise ValueError(f"cell {cell} assignment {users} is not a bijection")


def build_cost_matrix(realization, cell):
    """Cost matrix for one cell: entry (m, n) = log2(direct / cross) gain ratio.

    The ratio is taken before the log, so a common scaling of one user's
    gains cancels exactly and leaves the matrix unchanged.
    """
    h = realization.gains
    other = 1 - cell
    entries = np.log2(h[:, cell, :, cell] / h[:, cell, :, other])
    return CostMatrix(entries=entries, cell=cell)


def _min_cost_assignment(cost):
    """Dense augmenting-path assignment solver, O(n^3).

    ``cost`` is an n x n array-like; returns cols with cols[row] = column of
    the minimum-total-cost perfect matching.  Potentials u, v maintain
    reduced costs; each row is inserted by growing an alternating tree until
    a free column is reached.  Deterministic: scanning order breaks ties
    toward low indices.
    """
    n = len(cost)
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    matched_row = [0] * (n + 1)  # 1-based column -> 1-based row, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        matched_row[0] = i
        j0 = 0
        min_reduced = [math.inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = matched_row[j0]
            row = cost[i0 - 1]
            delta = math.inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < min_reduced[j]:
                    min_reduced[j] = cur
                    way[j] = j0
                if min_reduced[j] < delta:
                    delta = min_reduced[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[matched_row[j]] += delta
                    v[j] -= delta
                else:
                    min_reduced[j] -= delta
            j0 = j1
            if matched_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            matched_row[j0] = matched_row[j1]
            j0 = j1
    cols = [0] * n
    for j in range(1, n + 1):
        cols[matched_row[j] - 1] = j - 1
    return cols


def hungarian_max(cost):
    """Maximum-total-value assignment of a square cost matrix.

    Returns cols with cols[row] = assigned column.  Implemented as
    minimization of the negated matrix.
    """
    entries = np.asarray(cost.entries, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {entries.shape}")
    if not np.all(np.isfinite(entries)):
        raise ValueError("cost matrix has non-finite entries")
    if entries.shape[0] > MAX_MATRIX_SIZE:
        raise ValueError(f"matrix size {entries.shape[0]} exceeds solver guard {MAX_MATRIX_SIZE}")
    return tuple(_min_cost_assignment((-entries).tolist()))


def assign_hungarian(realization):
    """Best sub-channel assignment per cell under the approximate objective.

    The two cells decompose into independent square problems, each solved by
    the Hungarian method on its own cost matrix.
    """
    if realization.num_users != realization.num_subchannels:
        raise ValueError(
            f"square problem required, got {realization.num_users} users "
            f"and {realization.num_subchannels} sub-channels"
        )
    per_cell = []
    for cell in (0, 1):
        cols = hungarian_max(build_cost_matrix(realization, cell))
        users = [0] * len(cols)
        for user, sub in enumerate(cols):
            users[sub] = user
        per_cell.append(tuple(users))
    return Assignment(users_by_subchannel=tuple(per_cell))


def assign_exhaustive(realization, config, power_solver, enumeration_cap=DEFAULT_ENUMERATION_CAP):
    """Exhaustive joint assignment search (the optimal baseline).

    Enumerates every pair of per-cell bijections, runs ``power_solver``
    (gains, sigma2, p_max, r_min) -> allocation on each induced pair, and
    returns (assignment, total exact sum rate) maximizing the network rate
    with infeasible pairs contributing 0.  Per-pair solves are memoized on
    (user1, user2, subchannel) since many joint assignments share pairs.
    """
    n = realization.num_subchannels
    if realization.num_users != n:
        raise ValueError("square problem required for exhaustive enumeration")
    if n > enumeration_cap:
        raise ValueError(
            f"exhaustive enumeration of ({n}!)^2 assignments exceeds cap {enumeration_cap}"
        )
    pair_value = {}

    def value(m1, m2, sub):
        key = (m1, m2, sub)
        got = pair_value.get(key)
        if got is None:
            gains = pair_gains_for_users(realization, m1, m2, sub)
            alloc = power_solver(gains, config.sigma2, config.p_max, config.r_min)
            got = alloc.rates.r1 + alloc.rates.r2 if alloc.feasible else 0.0
            pair_value[key] = got
        return got

    perms = list(itertools.permutations(range(n)))
    best_total = -math.inf
    best = None
    for pi1 in perms:
        for pi2 in perms:
            total = 0.0
            for sub in range(n):
                total += value(pi1[sub], pi2[sub], sub)
            if total > best_total:
                best_total = total
                best = (pi1, pi2)
    return Assignment(users_by_subchannel=best), best_total


def assign_random(config, trial_index):
    """Uniformly random per-cell bijections from the trial's RNG stream."""
    rng = trial_rng(config.seed, trial_index, ASSIGNMENT_STREAM)
    n = config.num_subchannels
    per_cell = tuple(tuple(int(u) for u in rng.permutation(n)) for _ in range(2))
    return Assignment(users_by_subchannel=per_cell)
