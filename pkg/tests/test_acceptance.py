"""Exit criteria. Each test records one PASS/FAIL line for the terminal summary."""

import filecmp
import math
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE

from banditlab import cli
from banditlab.agents import HBTSAgent, ThompsonSampling
from banditlab.core import (PROFILES, ArmPosterior, BiasProfile, named_profile, update_failure,
                            update_success)
from banditlab.environments import BernoulliEnv, DatasetEnv
from banditlab.experiments import ExperimentConfig, run_episode, run_suite
from banditlab.rng import RandomStream, derive


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    assert ok, f"{key}: {detail}"


def test_1_baseline_reduction():
    start = time.perf_counter()
    env = BernoulliEnv((0.9, 0.1))
    seed, horizon = 20240611, 10_000

    rng = RandomStream(seed)
    literal = ThompsonSampling(2)
    literal_arms = []
    for _ in range(horizon):
        arm = literal.select_arm(rng)
        literal.observe(arm, env.pull(arm, rng))
        literal_arms.append(arm)

    rng = RandomStream(seed)
    agent = HBTSAgent(2, named_profile("TS"))
    hbts_arms = []
    for _ in range(horizon):
        arm = agent.select_arm(rng)
        agent.observe(arm, env.pull(arm, rng))
        hbts_arms.append(arm)

    elapsed = time.perf_counter() - start
    mismatches = sum(a != b for a, b in zip(literal_arms, hbts_arms))
    record("1 baseline reduction", mismatches == 0 and elapsed < 1.0,
           f"{mismatches} mismatched choices over T={horizon}, {elapsed:.2f}s (limit 1s)")


def test_2_update_algebra():
    start = time.perf_counter()
    worst = 0.0
    checked = []
    for p in PROFILES.values():
        if p.tau < 1:
            post = ArmPosterior()
            for _ in range(200):
                post = update_success(post, p)
            worst = max(worst, abs(post.s - p.alpha / (1 - p.tau)))
            checked.append(f"{p.name}:S")
        if p.phi < 1:
            post = ArmPosterior()
            for _ in range(200):
                post = update_failure(post, p)
            worst = max(worst, abs(post.f - p.beta / (1 - p.phi)))
            checked.append(f"{p.name}:F")
    unit = BiasProfile("unit")
    exact = True
    rng = np.random.default_rng(0)
    for s, f in zip(rng.uniform(1e-9, 1e6, 500), rng.uniform(1e-9, 1e6, 500)):
        post = ArmPosterior(float(s), float(f))
        exact &= update_success(post, unit) == ArmPosterior(post.s + 1, post.f)
        exact &= update_failure(post, unit) == ArmPosterior(post.s, post.f + 1)
    elapsed = time.perf_counter() - start
    record("2 update algebra", worst < 1e-6 and exact and elapsed < 1.0,
           f"max fixed-point error {worst:.2e} over {len(checked)} counters, "
           f"unit increments exact={exact}, {elapsed:.2f}s")


def _beta_reference(a, b, n):
    raw = [1.0]
    for k in range(4):
        raw.append(raw[-1] * (a + k) / (a + b + k))
    m1, m2, m3, m4 = raw[1:]
    var = m2 - m1 ** 2
    mu4 = m4 - 4 * m1 * m3 + 6 * m1 ** 2 * m2 - 3 * m1 ** 4
    return m1, var, math.sqrt(var / n), math.sqrt((mu4 - var ** 2) / n)


def test_3_sampler_statistics():
    start = time.perf_counter()
    n = 100_000
    worst = 0.0
    for i, (a, b) in enumerate([(1, 1), (2, 3), (5, 5), (0.5, 0.5), (100.5, 1)]):
        rng = RandomStream(derive(3, i))
        xs = np.array([rng.beta(a, b) for _ in range(n)])
        mean, var, se_m, se_v = _beta_reference(a, b, n)
        worst = max(worst, abs(xs.mean() - mean) / se_m, abs(xs.var(ddof=1) - var) / se_v)
    elapsed = time.perf_counter() - start
    record("3 sampler statistics", worst < 4 and elapsed < 5.0,
           f"largest deviation {worst:.2f} standard errors (limit 4), {elapsed:.2f}s (limit 5s)")


def test_4_oracle_regret():
    start = time.perf_counter()
    env = BernoulliEnv((0.9, 0.1))
    late_regret, late_fraction = [], []
    for i in range(20):
        res = run_episode(named_profile("TS"), env, "normal", 10_000, derive(4, i))
        late = res.step_regrets[-1000:]
        late_regret.append(sum(late) / 1000)
        late_fraction.append(sum(1 for r in late if r == 0.0) / 1000)
    regret, fraction = float(np.mean(late_regret)), float(np.mean(late_fraction))
    elapsed = time.perf_counter() - start
    record("4 oracle regret", regret < 0.05 and fraction > 0.95 and elapsed < 10.0,
           f"final-1000 per-step regret {regret:.4f} (<0.05), best-arm fraction {fraction:.4f} "
           f"(>0.95), {elapsed:.2f}s")


@pytest.mark.slow
def test_5_headline_directional(fixture_dir):
    # UCI files are not bundled; label-only fixtures with the UCI class counts stand in
    cfg = ExperimentConfig(profiles=list(PROFILES), environments=["internet-ads", "cnae-9"],
                           modes=["normal"], horizon=20_000, runs=10, base_seed=0, jitter=True,
                           data_dir=str(fixture_dir))
    rows = run_suite(cfg, jobs=1).rows
    parts, ok = [], True
    for env in cfg.environments:
        means = {r.profile: r.mean_error for r in rows if r.environment == env}
        ts = means.pop("TS")
        best = min(means, key=means.get)
        ok &= means[best] < ts
        parts.append(f"{env}: best HBTS {best} {100 * means[best]:.2f}% vs TS {100 * ts:.2f}%")
    record("5 headline claim (directional)", ok, "; ".join(parts))


def test_6_mode_semantics(fixture_dir):
    start = time.perf_counter()
    envs = [BernoulliEnv((0.7, 0.5, 0.3))]
    labels = [0] * 458 + [1] * 2821
    envs.append(DatasetEnv(labels, 2, name="ads-like"))
    same, frozen = True, True
    for env in envs:
        for i in range(5):
            seed = derive(6, i)
            for mode, a_name, b_name, idx in (("positive", "PD", "M", 1), ("negative", "AD", "M", 0)):
                a = run_episode(named_profile(a_name), env, mode, 5000, seed, jitter=False, trace=True)
                b = run_episode(named_profile(b_name), env, mode, 5000, seed, jitter=False, trace=True)
                same &= (a.trace == b.trace and a.pull_counts == b.pull_counts
                         and a.total_regret == b.total_regret and a.seed == b.seed)
                frozen &= all(sf[idx] == 1.0 for run in (a, b) for row in run.trace for sf in row[4])
    elapsed = time.perf_counter() - start
    record("6 mode semantics", same and frozen and elapsed < 30.0,
           f"PD==M (positive) and AD==M (negative) per seed: {same}; "
           f"suppressed counter fixed at 1: {frozen}; {elapsed:.2f}s")


def test_7_reproducibility(tmp_path, fixture_dir):
    cfg = tmp_path / "suite.cfg"
    cfg.write_text(f"data_dir = {fixture_dir}\nenvironments = internet-ads; bernoulli:0.9,0.1\n"
                   "profiles = AD ADHD AZ CP bvFTD PD M TS\nhorizon = 300\nruns = 3\nseed = 17\n"
                   "format = md\nraw = on\njobs = 2\n")
    outs = [tmp_path / "first", tmp_path / "second"]
    codes = [cli.main(["suite", "--config", str(cfg), "--out", str(o)]) for o in outs]
    names = sorted(p.name for p in outs[0].iterdir())
    match, mismatch, errors = filecmp.cmpfiles(outs[0], outs[1], names, shallow=False)
    record("7 reproducibility", codes == [0, 0] and not mismatch and not errors and len(match) == 9,
           f"{len(match)} files byte-identical, {len(mismatch)} differ")


def test_8_dataset_statistics():
    start = time.perf_counter()
    labels = [0] * 600 + [1] * 300 + [2] * 100
    env, rng = DatasetEnv(labels, 3), RandomStream(8)
    n, horizon = len(labels), 10_000
    rewards, seen = [], []
    for _ in range(horizon):
        reward, _ = env.step(0, rng)
        rewards.append(reward)
        seen.append(env.last_index)
    mean = sum(rewards) / horizon
    intact = all(sorted(seen[k:k + n]) == list(range(n)) for k in range(0, horizon - n + 1, n))
    elapsed = time.perf_counter() - start
    record("8 dataset statistics", 0.58 <= mean <= 0.62 and intact and elapsed < 5.0,
           f"mean reward {mean:.4f} in [0.58, 0.62], {horizon // n} passes intact: {intact}, "
           f"{elapsed:.2f}s")
