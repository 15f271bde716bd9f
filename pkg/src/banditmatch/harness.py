"""Experiment orchestration: config parsing, ensemble execution, two-level
aggregation, and CSV emission.

A run is an ensemble: ``instances`` problem instances from one named
generator, each simulated for ``trials`` independent trials per algorithm.
All randomness fans out deterministically from the master seed, so a config
file reproduces its outputs byte for byte, and algorithms listed together
face identical instances and availability sequences (reward draws diverge as
soon as match histories do). Curves are aggregated the two-level way: average
over a single instance's trials first, then average those instance curves,
reporting the across-instance standard deviation.

Config files are TOML with two tables. Example::

    [run]
    generator = "fig1"            # fig1|fig2|fig3|hard41|hard42
    algorithms = ["ac-etgs-random", "ac-etgs-weighted"]
    instances = 5
    trials = 5
    seed = 2024
    out_dir = "results/fig1"
    aggregation = "mean"          # mean | sum | per-player (over players)
    regret = "pseudo"             # pseudo | realized
    raw_every = 1                 # raw ledger row stride; 0 disables
    downsample = 2000             # max points per aggregate series
    threads = 1                   # 0 = one worker per cpu
    # horizon = 1000              # optional override of params.horizon

    [params]
    n_players = 5
    n_arms = 10
    horizon = 20000

Outputs in ``out_dir``: ``aggregate_<algorithm>.csv`` with columns
(algorithm, local_round, mean_optimal, std_optimal, mean_pessimal,
std_pessimal), a ``player`` column inserted in per-player mode, and
``raw_ledger.csv`` with columns (algorithm, instance_id, trial_id, player,
local_round, optimal_regret, pessimal_regret) unless disabled.
"""

from __future__ import annotations

import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from banditmatch.environment import EnvironmentSpec, derive_seed, make_rng, step, view
from banditmatch.instances import GENERATOR_NAMES, build_named_instance
from banditmatch.policies import POLICY_NAMES, PolicyState, make_policy, update
from banditmatch.regret import FailureDiagnostics, RegretLedger, record_round

THREADS_ENV_VAR = "BANDITMATCH_THREADS"

_AGGREGATIONS = ("mean", "sum", "per-player")
_REGRET_MODES = ("pseudo", "realized")

# seed fan-out tags (instance parameters, shared arm rankings, trial streams)
_TAG_INSTANCE = 1
_TAG_PREFS = 2
_TAG_TRIAL = 3


class ConfigError(ValueError):
    """A RunConfig failed validation."""


@dataclass
class RunConfig:
    generator: str
    algorithms: list
    params: dict = field(default_factory=dict)
    instances: int = 1
    trials: int = 1
    seed: int = 0
    horizon: int | None = None
    out_dir: str = "results"
    aggregation: str = "mean"
    regret: str = "pseudo"
    raw_every: int = 1
    downsample: int = 2000
    threads: int = 1


def load_config(path: str) -> RunConfig:
    """Parse a TOML config file into a RunConfig (unvalidated)."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    run = dict(doc.get("run", {}))
    params = dict(doc.get("params", {}))
    known = {f.name for f in fields(RunConfig)} - {"params"}
    unknown = set(run) - known
    if unknown:
        raise ConfigError(f"unknown [run] key(s): {sorted(unknown)}")
    extra_tables = set(doc) - {"run", "params"}
    if extra_tables:
        raise ConfigError(f"unknown table(s): {sorted(extra_tables)}")
    if "generator" not in run or "algorithms" not in run:
        raise ConfigError("[run] must set 'generator' and 'algorithms'")
    return RunConfig(params=params, **run)


def validate_config(config: RunConfig) -> list[str]:
    """All schema and invariant violations, as human-readable strings."""
    errors = []
    if config.generator not in GENERATOR_NAMES:
        errors.append(
            f"unknown generator {config.generator!r}; valid: {', '.join(GENERATOR_NAMES)}"
        )
    if not config.algorithms:
        errors.append("algorithms must be nonempty")
    for name in config.algorithms:
        if name not in POLICY_NAMES:
            errors.append(f"unknown algorithm {name!r}; valid: {', '.join(POLICY_NAMES)}")
    if len(set(config.algorithms)) != len(config.algorithms):
        errors.append("algorithms must not repeat")
    if config.instances < 1:
        errors.append("instances must be >= 1")
    if config.trials < 1:
        errors.append("trials must be >= 1")
    if config.horizon is not None and config.horizon < 1:
        errors.append("horizon override must be >= 1")
    if config.aggregation not in _AGGREGATIONS:
        errors.append(f"aggregation must be one of {_AGGREGATIONS}")
    if config.regret not in _REGRET_MODES:
        errors.append(f"regret must be one of {_REGRET_MODES}")
    if config.raw_every < 0:
        errors.append("raw_every must be >= 0 (0 disables raw output)")
    if config.downsample < 1:
        errors.append("downsample must be >= 1")
    if config.threads < 0:
        errors.append("threads must be >= 0 (0 = auto)")
    if config.generator in GENERATOR_NAMES:
        try:
            _effective_params(config)  # constructs and validates the param block
        except (ValueError, TypeError) as exc:
            errors.append(f"params: {exc}")
    return errors


def _effective_params(config: RunConfig) -> dict:
    params = dict(config.params)
    if config.horizon is not None:
        params["horizon"] = config.horizon
    # Dry-build the parameter dataclass so bad blocks fail before any work.
    from banditmatch import instances as _inst

    if config.generator in ("fig1", "fig2", "fig3"):
        raw = dict(params)
        if config.generator in ("fig2", "fig3") and "player_unavailability" not in raw:
            raw["player_unavailability"] = (0.5,) * int(raw.get("n_players", 0) or 0)
        if config.generator == "fig3":
            raw.setdefault("arm_pref_mode", "fixed")
            raw.setdefault("fixed_pref_seed", 0)
        _inst._params_from_dict(_inst.ExperimentFamilyParams, raw).validate()
    elif config.generator == "hard41":
        _inst._params_from_dict(_inst.HardInstanceParams41, params).validate()
    elif config.generator == "hard42":
        _inst._params_from_dict(_inst.HardInstanceParams42, params).validate()
    return params


def build_instance_spec(config: RunConfig, instance_id: int) -> EnvironmentSpec:
    """The spec of ensemble member ``instance_id`` (pure function of config)."""
    params = _effective_params(config)
    return build_named_instance(
        config.generator,
        params,
        instance_seed=derive_seed(config.seed, _TAG_INSTANCE, instance_id),
        shared_pref_seed=derive_seed(config.seed, _TAG_PREFS),
    )


def simulate_trial(
    spec: EnvironmentSpec,
    policy,
    reward_rng,
    policy_rng,
    *,
    realized: bool = False,
    track_failures: bool = False,
    on_round=None,
):
    """Run one trial of ``policy`` over the whole horizon.

    Per round: view -> policy decision -> reward draw -> ledger -> state
    update. Returns (ledger, diagnostics); diagnostics is None unless
    ``track_failures``. ``on_round(t, rv, decision, rewards)`` is invoked for
    every round with at least one player present.
    """
    from banditmatch.regret import failure_event  # local import keeps cycles out

    state = PolicyState.fresh(spec.n_players, spec.n_arms)
    ledger = RegretLedger(spec, realized=realized)
    diagnostics = FailureDiagnostics(spec.n_players) if track_failures else None
    players_at = spec.players_at
    for t in range(1, spec.horizon + 1):
        if not players_at[t - 1]:
            continue
        rv = view(spec, t)
        if diagnostics is not None:
            diagnostics.add(failure_event(state, spec, t))
        decision = policy.decide(state, rv, policy_rng)
        rewards = step(spec, t, decision.matching, reward_rng)
        record_round(ledger, spec, t, decision.matching, rewards)
        update(state, rv, decision.matching, rewards)
        if on_round is not None:
            on_round(t, rv, decision, rewards)
    return ledger, diagnostics


def trial_rngs(master_seed: int, instance_id: int, trial_id: int):
    """(reward rng, policy rng) for one trial; shared across algorithms so
    that paired runs face identical streams."""
    return (
        make_rng(master_seed, _TAG_TRIAL, instance_id, trial_id, 0),
        make_rng(master_seed, _TAG_TRIAL, instance_id, trial_id, 1),
    )


@dataclass
class AggregateSeries:
    """Two-level-averaged cumulative regret versus local round."""

    algorithm: str
    rounds: np.ndarray
    mean_optimal: np.ndarray
    std_optimal: np.ndarray
    mean_pessimal: np.ndarray
    std_pessimal: np.ndarray
    n_instances: int
    n_trials: int
    player: int | None = None


def _carry_forward(series: list, length: int) -> np.ndarray:
    arr = np.zeros(length)
    n = len(series)
    if n:
        arr[:n] = series
        arr[n:] = series[-1]
    return arr


def _combine_players(ledger_arrays: list, mode: str, length: int) -> np.ndarray:
    rows = [_carry_forward(s, length) for s in ledger_arrays]
    stacked = np.vstack(rows) if rows else np.zeros((1, length))
    return stacked.sum(axis=0) if mode == "sum" else stacked.mean(axis=0)


def _two_level(instance_curves: list) -> tuple[np.ndarray, np.ndarray]:
    length = max(len(c) for c in instance_curves)
    stacked = np.vstack([_carry_forward(list(c), length) for c in instance_curves])
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0, ddof=1) if stacked.shape[0] > 1 else np.zeros(length)
    return mean, std


def _downsample_idx(length: int, limit: int) -> np.ndarray:
    stride = max(1, -(-length // limit))
    idx = np.arange(stride - 1, length, stride)
    if length and (idx.size == 0 or idx[-1] != length - 1):
        idx = np.append(idx, length - 1)
    return idx


def _run_trial_payload(args):
    (generator, params, instance_seed, pref_seed, master, instance_id, trial_id,
     algorithm, realized) = args
    key = (generator, repr(sorted(params.items())), pref_seed, instance_seed)
    spec = _SPEC_CACHE.get(key)
    if spec is None:
        spec = build_named_instance(generator, params, instance_seed, pref_seed)
        _SPEC_CACHE.clear()
        _SPEC_CACHE[key] = spec
    reward_rng, policy_rng = trial_rngs(master, instance_id, trial_id)
    ledger, _ = simulate_trial(
        spec, make_policy(algorithm), reward_rng, policy_rng, realized=realized
    )
    optimal = [np.asarray(s) for s in ledger.optimal]
    pessimal = [np.asarray(s) for s in ledger.pessimal]
    return (algorithm, instance_id, trial_id), (optimal, pessimal)


_SPEC_CACHE: dict = {}


@dataclass
class RunResult:
    out_dir: str
    aggregates: dict  # algorithm -> list[AggregateSeries]
    aggregate_paths: dict  # algorithm -> csv path
    raw_path: str | None


def resolve_threads(config_threads: int, cli_threads: int | None = None) -> int:
    if cli_threads is not None and cli_threads > 0:
        return cli_threads
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer") from exc
        if value > 0:
            return value
    if config_threads > 0:
        return config_threads
    return os.cpu_count() or 1


def run(config: RunConfig, *, out_dir: str | None = None, threads: int | None = None) -> RunResult:
    """Execute the configured ensemble and write aggregate + raw CSVs."""
    errors = validate_config(config)
    if errors:
        raise ConfigError("; ".join(errors))
    out = out_dir or config.out_dir
    os.makedirs(out, exist_ok=True)
    n_threads = resolve_threads(config.threads, threads)
    params = _effective_params(config)
    pref_seed = derive_seed(config.seed, _TAG_PREFS)
    realized = config.regret == "realized"

    tasks = [
        (
            config.generator,
            params,
            derive_seed(config.seed, _TAG_INSTANCE, instance_id),
            pref_seed,
            config.seed,
            instance_id,
            trial_id,
            algorithm,
            realized,
        )
        for instance_id in range(config.instances)
        for algorithm in config.algorithms
        for trial_id in range(config.trials)
    ]
    results: dict = {}
    if n_threads <= 1 or len(tasks) <= 1:
        for task in tasks:
            key, payload = _run_trial_payload(task)
            results[key] = payload
    else:
        with ProcessPoolExecutor(max_workers=n_threads) as pool:
            for key, payload in pool.map(_run_trial_payload, tasks, chunksize=1):
                results[key] = payload

    aggregates: dict = {}
    paths: dict = {}
    for algorithm in config.algorithms:
        series_list = _aggregate_algorithm(config, results, algorithm)
        aggregates[algorithm] = series_list
        path = os.path.join(out, f"aggregate_{algorithm}.csv")
        _write_aggregate_csv(path, series_list, per_player=config.aggregation == "per-player")
        paths[algorithm] = path

    raw_path = None
    if config.raw_every > 0:
        raw_path = os.path.join(out, "raw_ledger.csv")
        _write_raw_csv(raw_path, config, results)
    return RunResult(out_dir=out, aggregates=aggregates, aggregate_paths=paths, raw_path=raw_path)


def _aggregate_algorithm(config: RunConfig, results: dict, algorithm: str) -> list:
    mode = config.aggregation
    per_instance: list = []  # mean | sum: curves; per-player: list of per-player curve lists
    n_players = None
    for instance_id in range(config.instances):
        trial_curves = []
        for trial_id in range(config.trials):
            optimal, pessimal = results[(algorithm, instance_id, trial_id)]
            n_players = len(optimal)
            length = max((len(s) for s in optimal), default=0)
            if mode == "per-player":
                trial_curves.append(
                    (
                        [_carry_forward(s, len(s)) for s in optimal],
                        [_carry_forward(s, len(s)) for s in pessimal],
                    )
                )
            else:
                trial_curves.append(
                    (
                        _combine_players(optimal, mode, length),
                        _combine_players(pessimal, mode, length),
                    )
                )
        if mode == "per-player":
            by_player = []
            for p in range(n_players):
                lengths = [len(tc[0][p]) for tc in trial_curves]
                length = max(lengths)
                opt = np.vstack(
                    [_carry_forward(list(tc[0][p]), length) for tc in trial_curves]
                ).mean(axis=0)
                pess = np.vstack(
                    [_carry_forward(list(tc[1][p]), length) for tc in trial_curves]
                ).mean(axis=0)
                by_player.append((opt, pess))
            per_instance.append(by_player)
        else:
            length = max(len(tc[0]) for tc in trial_curves)
            opt = np.vstack([_carry_forward(list(tc[0]), length) for tc in trial_curves]).mean(axis=0)
            pess = np.vstack([_carry_forward(list(tc[1]), length) for tc in trial_curves]).mean(axis=0)
            per_instance.append((opt, pess))

    def build(curves_opt, curves_pess, player=None):
        mean_o, std_o = _two_level(curves_opt)
        mean_p, std_p = _two_level(curves_pess)
        idx = _downsample_idx(len(mean_o), config.downsample)
        return AggregateSeries(
            algorithm=algorithm,
            rounds=idx + 1,
            mean_optimal=mean_o[idx],
            std_optimal=std_o[idx],
            mean_pessimal=mean_p[idx],
            std_pessimal=std_p[idx],
            n_instances=config.instances,
            n_trials=config.trials,
            player=player,
        )

    if mode == "per-player":
        out = []
        for p in range(n_players):
            out.append(
                build(
                    [inst[p][0] for inst in per_instance],
                    [inst[p][1] for inst in per_instance],
                    player=p,
                )
            )
        return out
    return [build([inst[0] for inst in per_instance], [inst[1] for inst in per_instance])]


def _write_aggregate_csv(path: str, series_list: list, *, per_player: bool) -> None:
    header = ["algorithm", "local_round", "mean_optimal", "std_optimal",
              "mean_pessimal", "std_pessimal"]
    if per_player:
        header.insert(1, "player")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for series in series_list:
            for i, r in enumerate(series.rounds):
                row = [
                    series.algorithm,
                    int(r),
                    repr(float(series.mean_optimal[i])),
                    repr(float(series.std_optimal[i])),
                    repr(float(series.mean_pessimal[i])),
                    repr(float(series.std_pessimal[i])),
                ]
                if per_player:
                    row.insert(1, series.player)
                writer.writerow(row)


def _write_raw_csv(path: str, config: RunConfig, results: dict) -> None:
    stride = config.raw_every
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["algorithm", "instance_id", "trial_id", "player", "local_round",
             "optimal_regret", "pessimal_regret"]
        )
        for algorithm in config.algorithms:
            for instance_id in range(config.instances):
                for trial_id in range(config.trials):
                    optimal, pessimal = results[(algorithm, instance_id, trial_id)]
                    for player, (opt, pess) in enumerate(zip(optimal, pessimal)):
                        for idx in range(0, len(opt), stride):
                            writer.writerow(
                                [
                                    algorithm,
                                    instance_id,
                                    trial_id,
                                    player,
                                    idx + 1,
                                    repr(float(opt[idx])),
                                    repr(float(pess[idx])),
                                ]
                            )


def list_generators() -> str:
    lines = [
        "fig1    randomized family; heterogeneous player unavailability (linspace 0.1..0.9),",
        "        per-round random arm rankings. params: n_players, n_arms, horizon,",
        "        reward_lo, reward_hi, player_unavailability, arm_unavailability",
        "fig2    as fig1 with every player's unavailability fixed at 0.5",
        "fig3    as fig2 with arm rankings drawn once (shared across the ensemble) and frozen",
        "hard41  fresh-competitor blocks over two arms. params: horizon, exponent, gap,",
        "        block_length, variant (competitor id with flipped rewards)",
        "hard42  rotating variable arm + fixed-arm hierarchy. params: n_players, n_arms,",
        "        horizon, gap, tilt, variant = [competing player, variable arm] (0-based)",
    ]
    return "\n".join(lines)
