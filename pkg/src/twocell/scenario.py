"""Experiment configuration and seeded channel generation for the two-cell uplink.

Channel power gains follow the flat-fading model: unit-mean exponential fading
(the power of a Rayleigh amplitude) times a deterministic distance path loss.
All randomness is derived from the master seed by counter-based stream
splitting, so every trial is reproducible and order-independent.
"""

import math
from dataclasses import dataclass, fields

import numpy as np

DEFAULT_SNR_GRID_DB = (0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0)

# Stream ids for per-trial random substreams.
FADING_STREAM = 0
ASSIGNMENT_STREAM = 1


class ConfigError(ValueError):
    """Raised when a scenario configuration violates an invariant."""


def db_to_linear(value_db):
    """Convert a dB quantity to linear scale: 10**(dB/10)."""
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """All parameters of one two-cell uplink experiment.

    Distances are meters, powers are watts (linear scale), rates are
    bits/s/Hz.  ``alpha`` is the path-loss exponent.  ``snr_grid_db`` lists
    the transmit-SNR points (p_max/sigma2 in dB) a sweep visits.
    """

    num_cells: int = 2
    num_users_per_cell: int = 3
    num_subchannels: int = 3
    p_max: float = 1.0
    sigma2: float = 1e-11
    r_min: float = 0.1
    alpha: float = 3.0
    d_serving: float = 100.0
    d_cross: float = 500.0
    trials: int = 2000
    snr_grid_db: tuple = DEFAULT_SNR_GRID_DB
    seed: int = 1234


def validate_config(raw):
    """Return ``raw`` unchanged iff every invariant holds.

    Raises ConfigError naming the first violated invariant.
    """
    if raw.num_cells != 2:
        raise ConfigError(f"num_cells: must be exactly 2, got {raw.num_cells}")
    if raw.num_users_per_cell != raw.num_subchannels:
        raise ConfigError(
            "num_users_per_cell/num_subchannels: square assignment required, "
            f"got {raw.num_users_per_cell} users and {raw.num_subchannels} sub-channels"
        )
    if raw.num_users_per_cell < 1:
        raise ConfigError(f"num_users_per_cell: must be at least 1, got {raw.num_users_per_cell}")
    if not (raw.p_max > 0.0 and math.isfinite(raw.p_max)):
        raise ConfigError(f"p_max: must be positive and finite, got {raw.p_max}")
    if not (raw.sigma2 > 0.0 and math.isfinite(raw.sigma2)):
        raise ConfigError(f"sigma2: must be positive and finite, got {raw.sigma2}")
    if not (raw.r_min >= 0.0 and math.isfinite(raw.r_min)):
        raise ConfigError(f"r_min: must be non-negative and finite, got {raw.r_min}")
    if not (raw.alpha > 0.0 and math.isfinite(raw.alpha)):
        raise ConfigError(f"alpha: must be positive and finite, got {raw.alpha}")
    if not (raw.d_serving > 0.0 and math.isfinite(raw.d_serving)):
        raise ConfigError(f"d_serving: must be positive and finite, got {raw.d_serving}")
    if not (raw.d_cross > 0.0 and math.isfinite(raw.d_cross)):
        raise ConfigError(f"d_cross: must be positive and finite, got {raw.d_cross}")
    if raw.trials < 1:
        raise ConfigError(f"trials: must be at least 1, got {raw.trials}")
    if any(not math.isfinite(s) for s in raw.snr_grid_db):
        raise ConfigError(f"snr_grid_db: all entries must be finite, got {raw.snr_grid_db}")
    if not (0 <= raw.seed < 2**64):
        raise ConfigError(f"seed: must fit an unsigned 64-bit integer, got {raw.seed}")
    return raw


_INT_KEYS = {"num_cells", "num_users_per_cell", "num_subchannels", "trials", "seed"}
_FLOAT_KEYS = {"p_max", "sigma2", "r_min", "alpha", "d_serving", "d_cross"}
_DB_KEYS = {"p_max_db": "p_max", "sigma2_db": "sigma2"}


def load_config(path):
    """Load a ScenarioConfig from a flat ``key = value`` text file.

    Lines starting with ``#`` (or anything after a ``#``) are comments.
    Keys are ScenarioConfig field names; power-valued keys also accept a
    ``_db`` suffix (converted as 10**(dB/10)).  ``snr_grid_db`` is a
    comma-separated list.  Unspecified keys keep their defaults.
    """
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
            key, value = (part.strip() for part in text.split("=", 1))
            try:
                if key in _DB_KEYS:
                    overrides[_DB_KEYS[key]] = db_to_linear(float(value))
                elif key in _INT_KEYS:
                    overrides[key] = int(value)
                elif key in _FLOAT_KEYS:
                    overrides[key] = float(value)
                elif key == "snr_grid_db":
                    overrides[key] = tuple(float(tok) for tok in value.replace(",", " ").split())
                else:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    defaults = {f.name: getattr(ScenarioConfig(), f.name) for f in fields(ScenarioConfig)}
    defaults.update(overrides)
    return validate_config(ScenarioConfig(**defaults))


def path_loss(distance, alpha):
    """Linear path-loss gain distance**(-alpha)."""
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return distance ** (-alpha)


@dataclass(frozen=True)
class ChannelRealization:
    """One trial's full gain tensor.

    ``gains[m, j, n, k]`` is the linear power gain from user ``m`` of cell
    ``j`` to the base station of cell ``k`` on sub-channel ``n``.  Shape is
    (num_users, 2, num_subchannels, 2); every entry is strictly positive.
    """

    gains: np.ndarray

    @property
    def num_users(self):
        return self.gains.shape[0]

    @property
    def num_subchannels(self):
        return self.gains.shape[2]


@dataclass(frozen=True)
class PairGains:
    """The four gains seen by one co-channel user pair.

    a: direct gain, cell-1 user at its own base station
    b: cross gain, cell-2 user received at base station 1
    c: direct gain, cell-2 user at its own base station
    d: cross gain, cell-1 user received at base station 2
    """

    a: float
    b: float
    c: float
    d: float


def trial_rng(seed, trial_index, stream):
    """Independent generator for (seed, trial, stream), order-independent.

    Counter-based splitting via SeedSequence spawn keys: the same tuple
    always yields the same stream no matter how many other trials ran.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial_index, stream)))


def generate_realization(config, trial_index):
    """Draw the gain tensor for one Monte-Carlo trial.

    Each entry is (unit-mean exponential fading) x (path loss), with the
    serving distance on j == k links and the cross distance otherwise.
    Deterministic in (config.seed, trial_index).
    """
    m = config.num_users_per_cell
    n = config.num_subchannels
    rng = trial_rng(config.seed, trial_index, FADING_STREAM)
    fading = rng.standard_exponential(size=(m, 2, n, 2))
    # gains must be strictly positive; an exact 0.0 draw has measure zero but
    # is representable
    fading = np.maximum(fading, np.finfo(float).tiny)
    cells = np.arange(2)
    dist = np.where(cells[:, None] == cells[None, :], config.d_serving, config.d_cross)
    loss = dist ** (-config.alpha)  # [j, k]
    return ChannelRealization(gains=fading * loss[None, :, None, :])


def pair_gains_for_users(realization, user_cell1, user_cell2, subchannel):
    """PairGains for explicit user indices sharing ``subchannel``."""
    h = realization.gains
    return PairGains(
        a=float(h[user_cell1, 0, subchannel, 0]),
        b=float(h[user_cell2, 1, subchannel, 0]),
        c=float(h[user_cell2, 1, subchannel, 1]),
        d=float(h[user_cell1, 0, subchannel, 1]),
    )


def pair_gains(realization, assignment, subchannel):
    """Extract the (a, b, c, d) gains of the pair sharing ``subchannel``."""
    if not 0 <= subchannel < realization.num_subchannels:
        raise IndexError(
            f"subchannel {subchannel} out of range for {realization.num_subchannels} sub-channels"
        )
    return pair_gains_for_users(
        realization,
        assignment.users_by_subchannel[0][subchannel],
        assignment.users_by_subchannel[1][subchannel],
        subchannel,
    )
