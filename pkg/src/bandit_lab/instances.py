"""Instance families: lower-bound constructions, adversarial streams and
random means drawn from distributions truncated to (0, 1]."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import Instance

MAX_REJECTION_ROUNDS = 10_000


def lb_epsilon(m: int, T: float) -> float:
    return 1.0 / (m ** (1 / 3) * T ** (1 / 3))


def lb_family(m: int, T: float, j: int, n: int | None = None) -> Instance:
    """Member j of the single-pass regret lower-bound family.

    j = 0 puts a mean-1 arm last among halves; j >= 1 lifts arm j (1-based
    position, index j-1) to (1 + eps)/2 with eps = (m T)^(-1/3).
    """
    n = m + 1 if n is None else n
    if not 0 <= j <= m:
        raise ValueError(f"j={j} outside 0..m={m}")
    if m >= n:
        raise ValueError("family needs m < n")
    if T < 1:
        raise ValueError("T must be >= 1")
    means = [0.5] * n
    if j == 0:
        means[-1] = 1.0
    else:
        means[j - 1] = (1 + lb_epsilon(m, T)) / 2
    return Instance(tuple(means))


def random_order_lb(n: int, epsilon: float, variant: int) -> Instance:
    if n < 2:
        raise ValueError("n must be >= 2")
    means = [0.5] * n
    if variant == 1:
        means[0] = (1 + epsilon) / 2
    elif variant == 2:
        means[-1] = 1.0
    else:
        raise ValueError("variant must be 1 or 2")
    return Instance(tuple(means))


def block_means_stream(epsilon: float, c1: int = 16, c2: int = 32768,
                          n: int | None = None) -> Instance:
    """Blocks of c1 equal means stepping down by eps/(c2-2); zeros after c1*c2 arms."""
    n = c1 * c2 + 1 if n is None else n
    if c2 < 3:
        raise ValueError("c2 must be >= 3")
    if n <= c1 * c2:
        raise ValueError("n must exceed c1 * c2")
    step = epsilon / (c2 - 2)
    if 0.5 - (c2 - 1) * step < 0:
        raise ValueError("epsilon too large: the last group's mean would be negative")
    means = [0.0] * n
    for i in range(c1 * c2):
        means[i] = 0.5 - (i // c1) * step
    return Instance(tuple(means))


def linear_gap_stream(n: int, epsilon: float, mu1: float = 0.5) -> Instance:
    if n < 3:
        raise ValueError("n must be >= 3")
    step = epsilon / (n - 2)
    if mu1 - (n - 1) * step < 0 or mu1 > 1:
        raise ValueError("means would leave [0, 1]")
    return Instance(tuple(mu1 - i * step for i in range(n)))


FAMILIES = ("uniform", "truncnormal", "trunclognormal", "truncexp", "beta",
            "truncgamma", "truncweibull")


@dataclass(frozen=True)
class DistSpec:
    """A distribution family restricted to (0, 1].

    Parameters: truncnormal ``mu, var``; trunclognormal ``mu, var`` of the
    underlying normal; truncexp ``lam`` (rate); beta ``alpha, beta``;
    truncgamma ``k, theta`` (shape, scale); truncweibull ``lam, k`` (scale, shape).
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        p = self.params
        positive = {
            "uniform": [], "truncnormal": ["var"], "trunclognormal": ["var"],
            "truncexp": ["lam"], "beta": ["alpha", "beta"],
            "truncgamma": ["k", "theta"], "truncweibull": ["lam", "k"],
        }[self.family]
        required = positive + (["mu"] if self.family in ("truncnormal", "trunclognormal") else [])
        for key in required:
            if key not in p:
                raise ValueError(f"{self.family} needs parameter {key!r}")
        for key in positive:
            if not float(p[key]) > 0:
                raise ValueError(f"{self.family} parameter {key} must be positive")

    def base(self):
        """Untruncated scipy distribution (used for the analytic CDF)."""
        p = {k: float(v) for k, v in self.params.items()}
        f = self.family
        if f == "uniform":
            return stats.uniform(0, 1)
        if f == "truncnormal":
            return stats.norm(p["mu"], math.sqrt(p["var"]))
        if f == "trunclognormal":
            return stats.lognorm(s=math.sqrt(p["var"]), scale=math.exp(p["mu"]))
        if f == "truncexp":
            return stats.expon(scale=1 / p["lam"])
        if f == "beta":
            return stats.beta(p["alpha"], p["beta"])
        if f == "truncgamma":
            return stats.gamma(p["k"], scale=p["theta"])
        return stats.weibull_min(p["k"], scale=p["lam"])

    def cdf(self, x):
        """CDF of the (0, 1]-truncated distribution."""
        d = self.base()
        lo, hi = d.cdf(0.0), d.cdf(1.0)
        x = np.asarray(x, dtype=float)
        out = (d.cdf(np.clip(x, 0.0, 1.0)) - lo) / (hi - lo)
        return np.where(x <= 0, 0.0, np.where(x > 1, 1.0, out))

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        p = {k: float(v) for k, v in self.params.items()}
        f = self.family
        if f == "uniform":
            # 1 - U lies in (0, 1]
            return 1.0 - rng.random(size)
        if f == "truncexp":
            lam = p["lam"]
            u = 1.0 - rng.random(size)
            return -np.log1p(-u * -np.expm1(-lam)) / lam
        if f == "truncweibull":
            lam, k = p["lam"], p["k"]
            u = 1.0 - rng.random(size)
            return lam * (-np.log1p(-u * -np.expm1(-(1 / lam) ** k))) ** (1 / k)
        draw = {
            "truncnormal": lambda m: rng.normal(p.get("mu", 0), math.sqrt(p.get("var", 1)), m),
            "trunclognormal": lambda m: rng.lognormal(p.get("mu", 0), math.sqrt(p.get("var", 1)), m),
            "beta": lambda m: rng.beta(p.get("alpha", 1), p.get("beta", 1), m),
            "truncgamma": lambda m: rng.gamma(p.get("k", 1), p.get("theta", 1), m),
        }[f]
        return _rejection(draw, size)


def _rejection(draw, size: int) -> np.ndarray:
    out = np.empty(size)
    filled = 0
    for _ in range(MAX_REJECTION_ROUNDS):
        if filled == size:
            return out
        need = size - filled
        cand = draw(max(2 * need, 16))
        cand = cand[(cand > 0) & (cand <= 1)][:need]
        out[filled:filled + cand.size] = cand
        filled += cand.size
    if filled < size:
        raise RuntimeError("rejection sampler exhausted its retry cap")
    return out


def sample_means(dist: DistSpec, n: int, seed: int | np.random.Generator) -> Instance:
    if n < 1:
        raise ValueError("n must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    values = np.clip(dist.sample(n, rng), 0.0, 1.0)
    return Instance(tuple(values.tolist()))


def parse_params(text: str | None) -> dict:
    """``"mu=0.5,var=1"`` -> ``{"mu": 0.5, "var": 1.0}``."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, val = item.partition("=")
        if not _:
            raise ValueError(f"bad parameter {item!r}; expected key=value")
        out[key.strip()] = float(val)
    return out


STRUCTURED = ("lb", "random-order-lb", "blocks", "linear-gap")


@dataclass(frozen=True)
class InstanceSpec:
    """Generator recipe for one instance: a distribution family or a structured stream."""

    family: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES + STRUCTURED:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.family in FAMILIES:
            DistSpec(self.family, self.params)

    @property
    def random(self) -> bool:
        return self.family in FAMILIES

    def build(self, seed: int | np.random.Generator | None = None, *,
              trial_index: int = 0, horizon: float | None = None) -> Instance:
        p = self.params
        f = self.family
        if f in FAMILIES:
            return sample_means(DistSpec(f, p), self.n, seed if seed is not None else 0)
        if f == "lb":
            m = int(p.get("m", 4))
            T = float(p.get("T", horizon if horizon is not None else 1e4))
            j = p.get("j", "cycle")
            j = trial_index % (m + 1) if j == "cycle" else int(j)
            return lb_family(m, T, j, self.n)
        if f == "random-order-lb":
            return random_order_lb(self.n, float(p.get("eps", 0.1)), int(p.get("variant", 1)))
        if f == "blocks":
            return block_means_stream(float(p.get("eps", 0.1)), int(p.get("c1", 4)),
                                         int(p.get("c2", 64)), self.n)
        return linear_gap_stream(self.n, float(p.get("eps", 0.1)), float(p.get("mu1", 0.5)))
