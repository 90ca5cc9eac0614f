"""Randomness kernel: truncated exponential radii, uniform ints, Bernoulli,
shuffles, and reproducible seeded streams with independent substreams.

Streams are owned, single-consumer objects.  A stream is identified by
(seed, path) where path is the spawn trail from the root; identical ids
reproduce identical draws, distinct ids are statistically independent
(numpy SeedSequence spawn keys).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_REJECTION_CAP = 10**6


class InternalFaultError(RuntimeError):
    """Signals an internal invariant violation (e.g. a rejection loop that
    failed to terminate within its cap)."""


@dataclass(frozen=True)
class TruncExpParams:
    """Parameters of the integer truncated exponential on [a, b)."""

    p: float
    a: int
    b: int

    def __post_init__(self):
        if not (self.p > 0):
            raise ValueError("rate p must be positive")
        if not (self.a < self.b):
            raise ValueError("need a < b")

    @property
    def epsilon(self) -> float:
        return math.exp(-self.p * (self.b - self.a) / 2)


class RngStream:
    """Seeded PCG64 stream with deterministic spawnable substreams."""

    __slots__ = ("seed", "path", "generator", "_children", "draws")

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.PCG64(ss))
        self._children = 0
        self.draws = 0

    def spawn(self) -> "RngStream":
        child = RngStream(self.seed, self.path + (self._children,))
        self._children += 1
        return child

    def unit_open(self) -> float:
        """Uniform draw in (0, 1] (never exactly 0)."""
        self.draws += 1
        return 1.0 - self.generator.random()

    def random(self, size=None):
        self.draws += 1 if size is None else int(np.prod(size))
        return self.generator.random(size)

    def integer(self, lo: int, hi_inclusive: int) -> int:
        self.draws += 1
        return int(self.generator.integers(lo, hi_inclusive + 1))

    def permutation(self, arr):
        a = np.asarray(arr)
        self.draws += max(0, a.shape[0] - 1)
        return self.generator.permutation(a)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path})"


def sample_trunc_exp(params: TruncExpParams, rng: RngStream) -> int:
    """Draw from TrunExp(p, a, b) by rejection: repeatedly sample
    a + floor(Exp(p)) and keep the first value below b."""
    a, b, p = params.a, params.b, params.p
    for _ in range(_REJECTION_CAP):
        u = rng.unit_open()
        x = a + int(math.floor(-math.log(u) / p))
        if x < b:
            return x
    raise InternalFaultError("truncated-exponential rejection did not terminate")


def sample_trunc_exp_many(params: TruncExpParams, size: int, rng: RngStream) -> np.ndarray:
    """Vectorized rejection sampling (same process as sample_trunc_exp)."""
    a, b, p = params.a, params.b, params.p
    out = np.empty(size, dtype=np.int64)
    filled = 0
    rounds = 0
    while filled < size:
        rounds += 1
        if rounds > _REJECTION_CAP:
            raise InternalFaultError("truncated-exponential rejection did not terminate")
        todo = size - filled
        u = 1.0 - rng.random(todo)
        x = a + np.floor(-np.log(u) / p).astype(np.int64)
        good = x[x < b]
        out[filled:filled + good.shape[0]] = good
        filled += good.shape[0]
    return out


def trunc_exp_pmf(params: TruncExpParams, x: int) -> float:
    """Probability mass of TrunExp(p, a, b) at integer x (0 outside [a, b))."""
    if x < params.a or x >= params.b:
        return 0.0
    p, a, b = params.p, params.a, params.b
    num = math.exp(-p * (x - a)) - math.exp(-p * (x - a + 1))
    den = 1.0 - math.exp(-p * (b - a))
    return num / den


def sample_uniform_int(lo_exclusive: int, hi_inclusive: int, rng: RngStream) -> int:
    """Uniform integer in (lo_exclusive, hi_inclusive]."""
    if not (lo_exclusive < hi_inclusive):
        raise ValueError("need lo_exclusive < hi_inclusive")
    return rng.integer(lo_exclusive + 1, hi_inclusive)


def sample_bernoulli(prob: float, rng: RngStream) -> bool:
    """True with the given probability; probabilities above 1 are clamped."""
    if prob < 0:
        raise ValueError("probability must be nonnegative")
    return bool(rng.random() < min(prob, 1.0))


def shuffle(items, rng: RngStream) -> list:
    """Uniformly random permutation (Fisher-Yates) of items, as a new list."""
    seq = list(items)
    if len(seq) <= 1:
        return seq
    idx = rng.permutation(np.arange(len(seq)))
    return [seq[i] for i in idx]
