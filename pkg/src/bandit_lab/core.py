"""Problem instances, seeding and run records shared by every algorithm.

Arms are indexed from 0 throughout the package.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# slack for float representation when testing mu_i >= mu* - eps
EPS_TOL = 1e-12


class RewardModel(enum.Enum):
    BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class Instance:
    """Ground-truth bandit instance: one mean per arm in [0, 1]."""

    means: tuple[float, ...]
    reward_model: RewardModel = RewardModel.BERNOULLI

    def __post_init__(self):
        means = tuple(float(m) for m in self.means)
        if not means:
            raise ValueError("an instance needs at least one arm")
        for i, m in enumerate(means):
            if not (0.0 <= m <= 1.0) or math.isnan(m):
                raise ValueError(f"mean of arm {i} is {m}, outside [0, 1]")
        object.__setattr__(self, "means", means)

    @property
    def n(self) -> int:
        return len(self.means)

    @property
    def best_arm(self) -> int:
        # np.argmax returns the first maximiser, i.e. ties go to the lowest index
        return int(np.argmax(self.means))

    @property
    def best_mean(self) -> float:
        return self.means[self.best_arm]

    def gap(self, arm: int) -> float:
        self._check(arm)
        return self.best_mean - self.means[arm]

    def gaps(self) -> np.ndarray:
        m = np.asarray(self.means)
        return m.max() - m

    def _check(self, arm: int) -> None:
        if not 0 <= arm < self.n:
            raise IndexError(f"arm {arm} out of range for n={self.n}")

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(format_instance(self))

    @classmethod
    def from_file(cls, path: str | Path) -> Instance:
        return parse_instance(Path(path).read_text())


def format_instance(instance: Instance) -> str:
    lines = [f"n={instance.n}"]
    lines.extend(repr(m) for m in instance.means)
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("instance file must start with a header line 'n=<int>'")
    n = int(lines[0][2:])
    means = [float(x) for x in lines[1:]]
    if len(means) != n:
        raise ValueError(f"header says n={n} but file holds {len(means)} means")
    return Instance(tuple(means))


def epsilon_best(instance: Instance, arm: int, epsilon: float) -> bool:
    instance._check(arm)
    return instance.means[arm] >= instance.best_mean - epsilon - EPS_TOL


def draw_reward(instance: Instance, arm: int, rng: np.random.Generator) -> int:
    """One Bernoulli reward; consumes exactly one uniform from ``rng``."""
    instance._check(arm)
    return int(rng.random() < instance.means[arm])


_STREAM_TAGS = {"reward": 0, "order": 1, "instance": 2}


@dataclass(frozen=True)
class SeedSpec:
    """(master_seed, trial_index) pair naming one reproducible trial.

    Child seeds come from ``numpy.random.SeedSequence`` over the entropy
    ``[master_seed, trial_index, tag]`` where tag is 0 for rewards, 1 for the
    arrival order and 2 for instance generation. The first 64-bit word of the
    generated state is the integer seed recorded in reports, so any single
    stream can be rebuilt with ``np.random.default_rng(seed)``.
    """

    master_seed: int
    trial_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")

    def seed(self, stream: str) -> int:
        ss = np.random.SeedSequence([self.master_seed, self.trial_index, _STREAM_TAGS[stream]])
        return int(ss.generate_state(1, np.uint64)[0])

    def rng(self, stream: str) -> np.random.Generator:
        return np.random.default_rng(self.seed(stream))


@dataclass
class RunOutcome:
    returned_arm: int
    true_gap: float
    total_pulls: int
    peak_residency: int
    per_level_pulls: dict[int, int] = field(default_factory=dict)
    wall_time_ms: float = 0.0
    trace: list[str] | None = None
