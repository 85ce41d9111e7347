"""Monte-Carlo experiment driver and CLI: SNR sweeps and feasibility curves.

A sweep point is defined by the received SNR a user would see over its
serving link at full power and mean fading:

    p_max = sigma2 * 10**(snr/10) * d_serving**alpha

with sigma2 held at the configured value and p_max swept.  (Defining SNR at
the transmitter instead would cap the received SNR 60 dB lower on the
default geometry and the grid would never reach the high-SINR region the
assignment approximation targets.)  All methods at a given trial index
consume the identical channel realization (paired sampling), so per-trial
dominance comparisons are meaningful and variance is reduced.  Trials whose
pairs are not all feasible contribute 0 to the mean rate and count against
the feasibility probability.
"""

import argparse
import sys
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .assign import assign_exhaustive, assign_hungarian, assign_random
from .power import full_power_pair, grid_oracle_pair, optimize_pair
from .ratemath import network_sum_rate
from .scenario import (
    ConfigError,
    db_to_linear,
    generate_realization,
    load_config,
    pair_gains,
    path_loss,
    validate_config,
)


class MethodId(Enum):
    """The compared strategies; the value is the CLI/CSV identifier."""

    EXHAUSTIVE_OPTIMAL = "a"      # exhaustive assignment + closed-form power
    HUNGARIAN_CLOSED_FORM = "b"   # Hungarian assignment + closed-form power
    RANDOM_FULL_POWER = "d"       # random assignment + full power


@dataclass(frozen=True)
class TrialResult:
    """One (method, SNR, trial) outcome."""

    method: MethodId
    snr_db: float
    sum_rate: float
    feasible: bool  # every pair feasible


@dataclass(frozen=True)
class SweepRow:
    """Aggregated statistics for one (method, SNR) sweep point."""

    method: MethodId
    snr_db: float
    mean_sum_rate: float
    feasibility_prob: float
    trials: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    """All sweep rows plus the configuration they came from."""

    config: object
    rows: tuple


def p_max_for_snr(config, snr_db):
    """Power budget realizing ``snr_db`` of received SNR over the serving link."""
    return config.sigma2 * db_to_linear(snr_db) / path_loss(config.d_serving, config.alpha)


def _evaluate_trial(realization, config, method, trial_index, snr_db):
    cfg = replace(config, p_max=p_max_for_snr(config, snr_db))
    if method is MethodId.RANDOM_FULL_POWER:
        assignment = assign_random(cfg, trial_index)
        solver = full_power_pair
    elif method is MethodId.HUNGARIAN_CLOSED_FORM:
        assignment = assign_hungarian(realization)
        solver = optimize_pair
    elif method is MethodId.EXHAUSTIVE_OPTIMAL:
        assignment, _ = assign_exhaustive(realization, cfg, optimize_pair)
        solver = optimize_pair
    else:
        raise ValueError(f"unknown method {method!r}")
    allocations = [
        solver(pair_gains(realization, assignment, n), cfg.sigma2, cfg.p_max, cfg.r_min)
        for n in range(cfg.num_subchannels)
    ]
    return TrialResult(
        method=method,
        snr_db=snr_db,
        sum_rate=network_sum_rate(realization, assignment, allocations, cfg.sigma2),
        feasible=all(alloc.feasible for alloc in allocations),
    )


def run_trial(config, method, trial_index, snr_db):
    """Run one trial: fresh realization, the method's assignment and power policy."""
    validate_config(config)
    return _evaluate_trial(generate_realization(config, trial_index), config, method, trial_index, snr_db)


def sweep(config, methods):
    """Average sum rate and feasibility probability over the SNR grid.

    All methods share channel realizations per trial index.  Aggregation is
    an ordered reduction over trial index, so results are independent of any
    execution interleaving.
    """
    validate_config(config)
    methods = tuple(methods)
    snr_points = tuple(sorted(config.snr_grid_db))
    rate_sums = {(m, s): 0.0 for m in methods for s in snr_points}
    feasible_counts = {(m, s): 0 for m in methods for s in snr_points}
    for trial in range(config.trials):
        realization = generate_realization(config, trial)
        for snr_db in snr_points:
            for method in methods:
                result = _evaluate_trial(realization, config, method, trial, snr_db)
                if result.feasible:
                    rate_sums[(method, snr_db)] += result.sum_rate
                    feasible_counts[(method, snr_db)] += 1
    rows = tuple(
        SweepRow(
            method=method,
            snr_db=snr_db,
            mean_sum_rate=rate_sums[(method, snr_db)] / config.trials,
            feasibility_prob=feasible_counts[(method, snr_db)] / config.trials,
            trials=config.trials,
            seed=config.seed,
        )
        for method in methods
        for snr_db in snr_points
    )
    return SweepResult(config=config, rows=rows)


def feasibility_curve(config, r_min_values, method):
    """One feasibility-probability-vs-SNR sweep per rate-floor value.

    Returns {r_min: SweepResult}; all sweeps share seeds, so curves for
    nested floors are exactly ordered.
    """
    return {
        float(r_min): sweep(validate_config(replace(config, r_min=float(r_min))), [method])
        for r_min in r_min_values
    }


def _fmt(value):
    return format(float(value), ".12g")


def emit_csv(result, destination):
    """Write a SweepResult as CSV with 12-significant-digit numerics.

    Columns: method,snr_db,mean_sum_rate,feasibility_prob,trials,seed; one
    row per (method, snr) with snr ascending within each method.
    """
    lines = ["method,snr_db,mean_sum_rate,feasibility_prob,trials,seed"]
    for row in result.rows:
        lines.append(
            f"{row.method.value},{_fmt(row.snr_db)},{_fmt(row.mean_sum_rate)},"
            f"{_fmt(row.feasibility_prob)},{row.trials},{row.seed}"
        )
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_methods(text):
    tokens = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not tokens:
        raise ValueError("no method ids given")
    methods = []
    for tok in tokens:
        try:
            methods.append(MethodId(tok))
        except ValueError:
            valid = ", ".join(m.value for m in MethodId)
            raise ValueError(f"invalid method id {tok!r} (valid: {valid})") from None
    return methods


def oracle_check(config, sample_trials=5, resolution=400):
    """Cross-validate the closed-form power solver against the grid oracle.

    Samples pairs from the first trials at the extreme SNR grid points and
    returns (instances checked, max sum-rate shortfall vs the oracle).
    """
    snr_points = sorted(config.snr_grid_db)
    snr_samples = {snr_points[0], snr_points[-1]} if snr_points else set()
    checked = 0
    worst = 0.0
    for trial in range(min(sample_trials, config.trials)):
        realization = generate_realization(config, trial)
        assignment = assign_hungarian(realization)
        for snr_db in sorted(snr_samples):
            p_max = p_max_for_snr(config, snr_db)
            for sub in range(config.num_subchannels):
                gains = pair_gains(realization, assignment, sub)
                alloc = optimize_pair(gains, config.sigma2, p_max, config.r_min)
                oracle = grid_oracle_pair(gains, config.sigma2, p_max, config.r_min, resolution)
                achieved = alloc.rates.r1 + alloc.rates.r2 if alloc.feasible else 0.0
                reference = oracle.rates.r1 + oracle.rates.r2 if oracle.feasible else 0.0
                worst = max(worst, reference - achieved)
                checked += 1
    return checked, worst


def _add_common_flags(parser):
    parser.add_argument("--config", required=True, help="scenario config file (key = value lines)")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--trials", type=int, help="override the config trial count")
    parser.add_argument("--oracle-check", action="store_true",
                        help="cross-validate the power solver against the grid oracle on sampled pairs")


def _load_cli_config(args):
    try:
        config = load_config(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config!r}: {exc.strerror or exc}") from exc
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        config = validate_config(replace(config, **overrides))
    return config


def cli_main(argv=None):
    """Entry point for the ``twocell`` command; returns the exit status."""
    parser = argparse.ArgumentParser(
        prog="twocell",
        description="Two-cell uplink sum-rate Monte-Carlo experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sweep_parser = sub.add_parser("sweep", help="average sum rate vs SNR for the chosen methods")
    _add_common_flags(sweep_parser)
    sweep_parser.add_argument("--methods", default="a,b,d",
                              help="comma-separated method ids (a=exhaustive, b=hungarian, d=random full power)")
    feas_parser = sub.add_parser("feasibility", help="feasibility probability vs SNR per rate floor")
    _add_common_flags(feas_parser)
    feas_parser.add_argument("--method", default="b", help="method id for the curves (default b)")
    feas_parser.add_argument("--r-min-list", default="0.1,0.5,1.0",
                             help="comma-separated rate floors, one curve per value")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = _load_cli_config(args)
        if args.command == "sweep":
            methods = _parse_methods(args.methods)
        else:
            methods = _parse_methods(args.method)
            if len(methods) != 1:
                raise ValueError("feasibility takes exactly one method id")
            floors = [float(tok) for tok in args.r_min_list.split(",") if tok.strip()]
            if not floors or any(f < 0 for f in floors):
                raise ValueError(f"invalid --r-min-list {args.r_min_list!r}")
    except (ConfigError, ValueError) as exc:
        flag = "--config" if isinstance(exc, ConfigError) else "--methods/--method/--r-min-list"
        print(f"twocell: error: {flag}: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "sweep":
            result = sweep(config, methods)
            out = Path(args.out or "sweep.csv")
            emit_csv(result, out)
            print(f"wrote {out} ({len(result.rows)} rows)")
        else:
            curves = feasibility_curve(config, floors, methods[0])
            base = Path(args.out or "feasibility.csv")
            for r_min, result in curves.items():
                out = base.with_name(f"{base.stem}_rmin{r_min:g}{base.suffix or '.csv'}")
                emit_csv(result, out)
                print(f"wrote {out} ({len(result.rows)} rows, r_min={r_min:g})")
    except OSError as exc:
        print(f"twocell: error: --out: {exc}", file=sys.stderr)
        return 1

    if args.oracle_check:
        checked, worst = oracle_check(config)
        print(f"oracle check: {checked} pair instances, max sum-rate shortfall {worst:.3e} bits")
    return 0


def main():
    sys.exit(cli_main())
