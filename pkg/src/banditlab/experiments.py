"""Run agents against environments and aggregate error rates over seeds."""

from __future__ import annotations

import math
import statistics
from array import array
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .agents import HBTSAgent
from .core import BiasProfile, RewardMode, jittered, named_profile
from .environments import BernoulliEnv, DatasetEnv, parse_bernoulli
from .ingestion import DatasetSpec, load_labels, lookup
from .rng import RandomStream, derive

DEFAULT_HORIZON = 10_000
DEFAULT_RUNS = 10


@dataclass
class RunResult:
    profile: str
    environment: str
    mode: RewardMode
    seed: int
    weights: tuple[float, float, float, float]
    total_regret: float
    error_rate: float
    pull_counts: tuple[int, ...]
    horizon: int
    jitter: bool = True
    final_posteriors: tuple[tuple[float, float], ...] = ()
    step_regrets: array | None = field(default=None, repr=False)
    trace: list | None = field(default=None, repr=False)

    @property
    def n_arms(self) -> int:
        return len(self.pull_counts)


@dataclass(frozen=True)
class AggregateRow:
    profile: str
    environment: str
    mode: RewardMode
    mean_error: float
    std_error: float
    runs: int


@dataclass(frozen=True)
class AverageRow:
    """Per-mode mean of each profile's error rate across environments."""

    mode: RewardMode
    environments: tuple[str, ...]
    mean_error: dict[str, float]


@dataclass
class SuiteResult:
    rows: list[AggregateRow]
    averages: list[AverageRow]
    runs: list[RunResult]


def run_episode(profile: BiasProfile, env, mode=RewardMode.NORMAL, horizon: int = DEFAULT_HORIZON,
                seed: int = 0, jitter: bool = True, keep_steps: bool = True,
                trace: bool = False) -> RunResult:
    """Play one run of ``horizon`` steps.

    Draw order on the run's stream: jitter (once, before step 1), then per
    step the K posterior samples in arm order followed by the environment's
    draw. ``env`` is reset first, so a fresh or reused instance behaves the
    same.

    With ``trace`` each step appends ``(t, arm, reward, regret, shapes)``
    where ``shapes`` lists every arm's (S, F) after the update.
    """
    mode = RewardMode.parse(mode)
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    rng = RandomStream(seed)
    if hasattr(env, "reset"):
        env.reset()
    used = jittered(profile, rng) if jitter else profile
    agent = HBTSAgent(env.n_arms, used)
    pulls = [0] * env.n_arms
    steps = array("d", bytes(8 * horizon))
    rows = [] if trace else None

    select, observe = agent.select_arm, agent.observe
    pull, regret = env.pull, env.regret
    for t in range(horizon):
        arm = select(rng)
        reward = pull(arm, rng)
        r = regret(arm, reward)
        steps[t] = r
        pulls[arm] += 1
        observe(arm, reward, mode)
        if rows is not None:
            rows.append((t, arm, reward, r, tuple((p.s, p.f) for p in agent.posteriors)))

    total = math.fsum(steps)
    return RunResult(
        profile=profile.name,
        environment=env.name,
        mode=mode,
        seed=rng.seed,
        weights=used.weights,
        total_regret=total,
        error_rate=total / horizon,
        pull_counts=tuple(pulls),
        horizon=horizon,
        jitter=jitter,
        final_posteriors=tuple((p.s, p.f) for p in agent.posteriors),
        step_regrets=steps if keep_steps else None,
        trace=rows,
    )


@dataclass(frozen=True)
class EnvSource:
    """Recipe for building a fresh environment per episode."""

    name: str
    probs: tuple[float, ...] | None = None
    labels: tuple[int, ...] | None = None
    n_classes: int = 0

    def make(self):
        if self.probs is not None:
            return BernoulliEnv(self.probs, name=self.name)
        return DatasetEnv(self.labels, self.n_classes, name=self.name)


def resolve_environment(name: str, data_dir=None, specs: dict[str, DatasetSpec] | None = None) -> EnvSource:
    """Turn ``bernoulli:p1,p2`` or a dataset name into an EnvSource.

    Datasets are looked up in ``specs`` first (overrides from a config file),
    then in the registry. Load errors propagate.
    """
    if name.strip().lower().startswith("bernoulli:"):
        env = parse_bernoulli(name)
        return EnvSource(env.name, probs=env.probs)
    if specs and name in specs:
        spec = specs[name]
        if data_dir is not None and not spec.path.is_absolute():
            spec = replace(spec, path=Path(data_dir) / spec.path)
    else:
        spec = lookup(name, data_dir)
    loaded = load_labels(spec)
    return EnvSource(spec.name, labels=loaded.labels, n_classes=loaded.n_classes)


@dataclass
class ExperimentConfig:
    profiles: list[str] = field(default_factory=list)
    environments: list[str] = field(default_factory=list)
    modes: list[RewardMode] = field(default_factory=lambda: list(RewardMode))
    horizon: int = DEFAULT_HORIZON
    runs: int = DEFAULT_RUNS
    base_seed: int = 0
    jitter: bool = True
    data_dir: str | None = None
    custom_profiles: dict[str, BiasProfile] = field(default_factory=dict)
    datasets: dict[str, DatasetSpec] = field(default_factory=dict)

    def profile(self, name: str) -> BiasProfile:
        if name in self.custom_profiles:
            return self.custom_profiles[name]
        return named_profile(name)

    def validate(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.base_seed}")
        if not self.profiles:
            raise ValueError("no profiles configured")
        if not self.environments:
            raise ValueError("no environments configured")
        if not self.modes:
            raise ValueError("no reward modes configured")
        self.modes = [RewardMode.parse(m) for m in self.modes]
        for name in self.profiles:
            self.profile(name)
        for name in self.environments:
            if name.strip().lower().startswith("bernoulli:"):
                parse_bernoulli(name)
            elif name not in self.datasets:
                lookup(name, self.data_dir)


# Worker-process state; set once per process by _init_worker.
_SOURCES: dict[str, EnvSource] = {}


def _init_worker(sources):
    global _SOURCES
    _SOURCES = sources


def _run_task(task):
    profile, env_name, mode, seed, horizon, jitter, trace = task
    env = _SOURCES[env_name].make()
    return run_episode(profile, env, mode, horizon, seed, jitter=jitter, keep_steps=False,
                       trace=trace)


def aggregate(results: list[RunResult]) -> tuple[float, float]:
    """Mean and sample standard deviation (n - 1) of error rates; std is 0 for one run."""
    errs = [r.error_rate for r in results]
    mean = math.fsum(errs) / len(errs)
    std = statistics.stdev(errs) if len(errs) > 1 else 0.0
    return mean, std


def run_suite(config: ExperimentConfig, jobs: int = 1, trace: bool = False) -> SuiteResult:
    """Run every (profile, environment, mode) triple ``config.runs`` times.

    Run ``i`` of every triple uses seed ``derive(base_seed, i)``, so profiles
    are compared on common random numbers. Results are ordered by the
    config's profile, environment and mode order, then run index, whatever
    the completion order of parallel workers.
    """
    config.validate()
    sources = {}
    for name in config.environments:
        src = resolve_environment(name, config.data_dir, config.datasets)
        sources[name] = src
    env_names = {name: src.name for name, src in sources.items()}

    seeds = [derive(config.base_seed, i) for i in range(config.runs)]
    tasks = []
    for p in config.profiles:
        prof = config.profile(p)
        for e in config.environments:
            for m in config.modes:
                for seed in seeds:
                    tasks.append((prof, e, m, seed, config.horizon, config.jitter, trace))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(sources,)) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        _init_worker(sources)
        results = [_run_task(t) for t in tasks]

    rows = []
    n = config.runs
    for k in range(0, len(results), n):
        group = results[k:k + n]
        mean, std = aggregate(group)
        first = group[0]
        rows.append(AggregateRow(first.profile, first.environment, first.mode, mean, std, n))

    averages = []
    envs = tuple(env_names[e] for e in config.environments)
    for m in config.modes:
        means = {}
        for p in config.profiles:
            vals = [r.mean_error for r in rows if r.profile == config.profile(p).name and r.mode is m]
            means[config.profile(p).name] = math.fsum(vals) / len(vals)
        averages.append(AverageRow(m, envs, means))
    return SuiteResult(rows, averages, results)
