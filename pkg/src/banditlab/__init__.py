"""Thompson-sampling bandits with reward-processing bias profiles."""

from .agents import HBTSAgent, ThompsonSampling, new_agent
from .core import (EPS, PROFILE_NAMES, PROFILES, ArmPosterior, BiasProfile, RewardMode, jittered,
                   named_profile, update_failure, update_success)
from .environments import BernoulliEnv, DatasetEnv, parse_bernoulli
from .experiments import ExperimentConfig, RunResult, run_episode, run_suite
from .ingestion import DatasetSpec, load_labels, registry
from .rng import RandomStream, beta_sample, derive, gamma_sample, uniform01

__version__ = "0.1.0"
