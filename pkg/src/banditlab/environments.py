"""Reward generators for the agents.

``BernoulliEnv`` is a stationary bandit with known arm means, used where the
expected regret can be computed exactly. ``DatasetEnv`` turns a column of
class labels into a bandit: each step reveals the next instance of a random
pass over the data (sampling without replacement, reshuffled when a pass
ends) and pays 1 only for the arm matching that instance's class.
"""

from __future__ import annotations

from typing import Sequence


class BernoulliEnv:
    def __init__(self, probs: Sequence[float], name: str | None = None) -> None:
        probs = [float(p) for p in probs]
        if len(probs) < 2:
            raise ValueError(f"a bandit needs at least 2 arms, got {len(probs)}")
        if not all(0.0 <= p <= 1.0 for p in probs):
            raise ValueError(f"arm probabilities must lie in [0, 1], got {probs}")
        self.probs = tuple(probs)
        self.mu_star = max(probs)
        self.name = name or "bernoulli:" + ",".join(format(p, "g") for p in probs)

    @property
    def n_arms(self) -> int:
        return len(self.probs)

    def __repr__(self) -> str:
        return f"BernoulliEnv({list(self.probs)})"

    def reset(self) -> None:
        pass

    def _check(self, arm: int) -> None:
        if not 0 <= arm < len(self.probs):
            raise IndexError(f"arm {arm} out of range for {len(self.probs)} arms")

    def pull(self, arm: int, rng) -> int:
        self._check(arm)
        return 1 if rng.uniform() < self.probs[arm] else 0

    def regret(self, arm: int, reward: int) -> float:
        """Expected regret of the pull: mu_star - mu_arm (independent of reward)."""
        return self.mu_star - self.probs[arm]


class DatasetEnv:
    """Label stream sampled without replacement.

    The permutation is built lazily, one Fisher-Yates swap per step, so each
    step consumes exactly one uniform from the stream and a pass over a large
    dataset costs nothing up front. Any prefix of a pass is a uniformly random
    ordered sample without replacement.

    Parameters
    ----------
    labels : sequence of int
        Class index of every instance, each in ``range(n_classes)``.
    n_classes : int
        Number of arms K.
    """

    def __init__(self, labels: Sequence[int], n_classes: int, name: str = "dataset") -> None:
        if n_classes < 2:
            raise ValueError(f"a bandit needs at least 2 arms, got {n_classes}")
        if len(labels) == 0:
            raise ValueError("empty label sequence")
        labels = list(labels)
        bad = [y for y in labels if not 0 <= y < n_classes]
        if bad:
            raise ValueError(f"label {bad[0]} out of range for {n_classes} classes")
        self.labels = labels
        self.K = n_classes
        self.name = name
        self.reset()

    def reset(self) -> None:
        """Return to the start of a first pass (identity order, cursor 0)."""
        self.permutation = list(range(len(self.labels)))
        self.cursor = 0
        self.passes = 0
        self.last_index: int | None = None

    @property
    def n_arms(self) -> int:
        return self.K

    def __repr__(self) -> str:
        return f"DatasetEnv({self.name!r}, n={len(self.labels)}, K={self.K})"

    def _next_instance(self, rng) -> int:
        perm = self.permutation
        c = self.cursor
        remaining = len(perm) - c
        j = c + min(int(rng.uniform() * remaining), remaining - 1)
        perm[c], perm[j] = perm[j], perm[c]
        idx = perm[c]
        c += 1
        if c == len(perm):
            c = 0
            self.passes += 1
        self.cursor = c
        self.last_index = idx
        return idx

    def step(self, arm: int, rng) -> tuple[int, int]:
        """Reveal the next instance; return (reward, true label)."""
        if not 0 <= arm < self.K:
            raise IndexError(f"arm {arm} out of range for {self.K} arms")
        label = self.labels[self._next_instance(rng)]
        return (1 if arm == label else 0), label

    def pull(self, arm: int, rng) -> int:
        return self.step(arm, rng)[0]

    def regret(self, arm: int, reward: int) -> float:
        # the instance's own label would always have paid 1
        return float(1 - reward)


def pull_bernoulli(env: BernoulliEnv, arm: int, rng) -> int:
    return env.pull(arm, rng)


def step_dataset(env: DatasetEnv, arm: int, rng) -> tuple[int, int]:
    return env.step(arm, rng)


def per_step_regret(env, arm: int, reward: int) -> float:
    return env.regret(arm, reward)


def parse_bernoulli(text: str) -> BernoulliEnv:
    """Build a BernoulliEnv from ``"bernoulli:p1,p2,..."``."""
    prefix, _, body = text.partition(":")
    if prefix.strip().lower() != "bernoulli" or not body.strip():
        raise ValueError(f"expected 'bernoulli:p1,p2,...', got {text!r}")
    try:
        probs = [float(p) for p in body.split(",")]
    except ValueError:
        raise ValueError(f"bad arm probabilities in {text!r}") from None
    return BernoulliEnv(probs)
