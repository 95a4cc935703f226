"""Thompson-sampling agents over Bernoulli arms."""

from __future__ import annotations

from .core import ArmPosterior, BiasProfile, RewardMode, update_failure, update_success


def _argmax(values) -> int:
    # strict '>' keeps the lowest index on ties
    best, best_i = values[0], 0
    for i in range(1, len(values)):
        if values[i] > best:
            best, best_i = values[i], i
    return best_i


def _default_sampler(rng, a, b):
    return rng.beta(a, b)


class HBTSAgent:
    """Thompson sampling with weighted (biased) posterior updates.

    Parameters
    ----------
    n_arms : int
        Number of arms K, at least 2.
    profile : BiasProfile
        Weights used for every update; already jittered if jitter is wanted.
    sampler : callable, optional
        ``sampler(rng, a, b)`` returning a Beta(a, b) draw. Tests replace it
        to force ties or rescale samples.
    """

    def __init__(self, n_arms: int, profile: BiasProfile, sampler=None) -> None:
        if int(n_arms) != n_arms or n_arms < 2:
            raise ValueError(f"a bandit needs at least 2 arms, got {n_arms!r}")
        self.n_arms = int(n_arms)
        self.profile = profile
        self.posteriors = [ArmPosterior() for _ in range(self.n_arms)]
        self.sampler = sampler or _default_sampler

    def __repr__(self) -> str:
        return f"HBTSAgent(n_arms={self.n_arms}, profile={self.profile.name!r})"

    def sample_thetas(self, rng) -> list[float]:
        sampler = self.sampler
        return [sampler(rng, p.s, p.f) for p in self.posteriors]

    def select_arm(self, rng) -> int:
        """Sample every arm's posterior in index order and play the argmax."""
        return _argmax(self.sample_thetas(rng))

    def observe(self, arm: int, reward: int, mode: RewardMode = RewardMode.NORMAL) -> "HBTSAgent":
        """Update the played arm; ``mode`` may suppress one of the two updates."""
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} out of range for {self.n_arms} arms")
        if reward == 1:
            if mode is not RewardMode.NEGATIVE_ONLY:
                self.posteriors[arm] = update_success(self.posteriors[arm], self.profile)
        elif reward == 0:
            if mode is not RewardMode.POSITIVE_ONLY:
                self.posteriors[arm] = update_failure(self.posteriors[arm], self.profile)
        else:
            raise ValueError(f"reward must be 0 or 1, got {reward!r}")
        return self


def new_agent(n_arms: int, profile: BiasProfile) -> HBTSAgent:
    return HBTSAgent(n_arms, profile)


class ThompsonSampling:
    """Plain Bernoulli Thompson sampling with integer success/failure counts.

    Kept separate from :class:`HBTSAgent` as a reference: with the unit
    profile the two must choose the same arms from the same stream.
    """

    def __init__(self, n_arms: int) -> None:
        if n_arms < 2:
            raise ValueError(f"a bandit needs at least 2 arms, got {n_arms!r}")
        self.n_arms = n_arms
        self.successes = [1] * n_arms
        self.failures = [1] * n_arms

    def select_arm(self, rng) -> int:
        thetas = [rng.beta(self.successes[i], self.failures[i]) for i in range(self.n_arms)]
        return _argmax(thetas)

    def observe(self, arm: int, reward: int) -> None:
        if reward == 1:
            self.successes[arm] += 1
        else:
            self.failures[arm] += 1
