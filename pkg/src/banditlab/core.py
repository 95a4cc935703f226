"""Bias profiles, Beta arm posteriors and the weighted update rules.

A profile carries four nonnegative weights: ``tau``/``phi`` scale the
accumulated success/failure shape of the chosen arm and ``alpha``/``beta``
weight the current success/failure. With all four equal to 1 the updates
reduce to the ordinary +1 increments of Bernoulli Thompson sampling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

EPS = 1e-9
# Upper clamp for shape parameters; tau or phi above 1 grows them geometrically.
SHAPE_MAX = 1e300

WEIGHTS = ("tau", "alpha", "phi", "beta")


class RewardMode(enum.Enum):
    """Which posterior updates an agent is allowed to apply."""

    NORMAL = "normal"
    POSITIVE_ONLY = "positive"
    NEGATIVE_ONLY = "negative"

    @classmethod
    def parse(cls, text: str | "RewardMode") -> "RewardMode":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {"positiveonly": "positive", "positive_only": "positive",
                   "negativeonly": "negative", "negative_only": "negative"}
        key = aliases.get(key, key)
        for mode in cls:
            if mode.value == key:
                return mode
        raise ValueError(f"unknown reward mode {text!r}; expected one of "
                         f"{', '.join(m.value for m in cls)}")


def _clamp_shape(x: float) -> float:
    if x != x:  # NaN only arises from inf * 0, which the weight checks exclude
        raise FloatingPointError("posterior update produced NaN")
    return min(max(x, EPS), SHAPE_MAX)


@dataclass(frozen=True)
class ArmPosterior:
    """Beta(s, f) belief over one arm's success probability."""

    s: float = 1.0
    f: float = 1.0

    def __post_init__(self):
        for name in ("s", "f"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"posterior shape {name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class BiasProfile:
    """Weights of the HBTS update plus per-weight jitter half-widths.

    ``jitter`` is ordered like :data:`WEIGHTS`: (tau, alpha, phi, beta).
    """

    name: str
    tau: float = 1.0
    alpha: float = 1.0
    phi: float = 1.0
    beta: float = 1.0
    jitter: tuple[float, float, float, float] = field(default=(0.0, 0.0, 0.0, 0.0))

    def __post_init__(self):
        for w in WEIGHTS:
            v = float(getattr(self, w))
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"profile {self.name}: {w} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, w, v)
        jitter = tuple(float(h) for h in self.jitter)
        if len(jitter) != 4:
            raise ValueError(f"profile {self.name}: jitter needs 4 half-widths, got {len(jitter)}")
        if not all(math.isfinite(h) and h >= 0.0 for h in jitter):
            raise ValueError(f"profile {self.name}: jitter half-widths must be finite and >= 0")
        object.__setattr__(self, "jitter", jitter)

    @property
    def weights(self) -> tuple[float, float, float, float]:
        return (self.tau, self.alpha, self.phi, self.beta)

    def to_dict(self) -> dict[str, str]:
        """Flat key/value form: name, the four weights, jitter_<weight>."""
        out = {"name": self.name}
        for w, v in zip(WEIGHTS, self.weights):
            out[w] = repr(v)
        for w, h in zip(WEIGHTS, self.jitter):
            out[f"jitter_{w}"] = repr(h)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, str], name: str | None = None) -> "BiasProfile":
        name = name if name is not None else data.get("name")
        if not name:
            raise ValueError("profile needs a name")
        base = PROFILES.get(name)
        kwargs = {}
        for w in WEIGHTS:
            if w in data:
                kwargs[w] = float(data[w])
            elif base is not None:
                kwargs[w] = getattr(base, w)
        jitter = list(base.jitter) if base is not None else [0.0] * 4
        for i, w in enumerate(WEIGHTS):
            if f"jitter_{w}" in data:
                jitter[i] = float(data[f"jitter_{w}"])
        return cls(name=name, jitter=tuple(jitter), **kwargs)


def _p(name, tau, alpha, phi, beta, jitter):
    return BiasProfile(name, tau, alpha, phi, beta, jitter)


_J = (0.1, 0.1, 0.1, 0.1)

# Center weights and "±" half-widths; AD is the addiction model, AZ Alzheimer's.
PROFILES: dict[str, BiasProfile] = {
    p.name: p
    for p in (
        _p("AD", 1.0, 1.0, 0.5, 1.0, _J),
        _p("ADHD", 0.2, 1.0, 0.2, 1.0, _J),
        _p("AZ", 0.1, 1.0, 0.1, 1.0, _J),
        _p("CP", 0.5, 0.5, 1.0, 1.0, _J),
        _p("bvFTD", 0.5, 100.0, 0.5, 1.0, (0.1, 10.0, 0.1, 0.1)),
        _p("PD", 0.5, 1.0, 0.5, 100.0, (0.1, 0.1, 0.1, 10.0)),
        _p("M", 0.5, 1.0, 0.5, 1.0, _J),
        _p("TS", 1.0, 1.0, 1.0, 1.0, (0.0, 0.0, 0.0, 0.0)),
    )
}

PROFILE_NAMES = tuple(PROFILES)

DISPLAY_NAMES = {
    "AD": "Addiction",
    "ADHD": "ADHD",
    "AZ": "Alzheimer's",
    "CP": "Chronic Pain",
    "bvFTD": "bvFTD",
    "PD": "Parkinson",
    "M": "M",
    "TS": "TS",
}


def named_profile(name: str) -> BiasProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(f"unknown profile {name!r}; valid names: {', '.join(PROFILE_NAMES)}") from None


def jittered(profile: BiasProfile, rng) -> BiasProfile:
    """Draw each weight uniformly from center ± half-width, clamped to >= EPS.

    Weights with zero half-width are returned as-is and consume no draws,
    in (tau, alpha, phi, beta) order.
    """
    values = []
    for center, half in zip(profile.weights, profile.jitter):
        if half > 0.0:
            center = max(center + half * (2.0 * rng.uniform() - 1.0), EPS)
        values.append(center)
    tau, alpha, phi, beta = values
    return replace(profile, tau=tau, alpha=alpha, phi=phi, beta=beta, jitter=(0.0, 0.0, 0.0, 0.0))


def update_success(post: ArmPosterior, profile: BiasProfile) -> ArmPosterior:
    """S <- tau * S + alpha; F unchanged."""
    return ArmPosterior(_clamp_shape(profile.tau * post.s + profile.alpha), post.f)


def update_failure(post: ArmPosterior, profile: BiasProfile) -> ArmPosterior:
    """F <- phi * F + beta; S unchanged."""
    return ArmPosterior(post.s, _clamp_shape(profile.phi * post.f + profile.beta))
