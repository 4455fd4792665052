"""Deterministic pseudo-random streams for reproducible augmentation.

Every random quantity in this package is drawn from an :class:`RngStream`, a
splittable 64-bit generator keyed by ``(seed, stream_id)``. Two streams built
from the same key produce bitwise-identical sequences for the same sequence of
calls, and child streams derived via :meth:`RngStream.derive` depend only on
the key, never on how much the parent has been consumed. That makes per-sample
and per-quadrant work safe to fan out across workers without shared state.

The core generator is SplitMix64: a 64-bit counter advanced by a fixed odd
increment, pushed through an avalanching finalizer. Symmetric Beta variates
use Joehnk's rejection method below shape 1 (where the density is U-shaped and
ratio-of-gammas loses accuracy) and the Marsaglia-Tsang ratio of two gamma
draws at shape >= 1. Shape 0 is the documented degenerate case: a fair coin
over {0.0, 1.0}, so boundary draws land on canvas corners and augmentation
passes originals through untouched.
"""

from __future__ import annotations

import math

from .validation import check_beta, check_seed

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO53 = float(1 << 53)
_TWO_PI = 2.0 * math.pi


def _mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """A deterministic random stream identified by ``(seed, stream_id)``.

    Instances are cheap; make one per independent unit of work. Methods
    advance the stream's private counter, so the n-th draw of a given kind
    depends only on the key and the preceding call sequence.
    """

    __slots__ = ("seed", "stream_id", "_state")

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = check_seed(seed, "seed")
        self.stream_id = check_seed(stream_id, "stream_id")
        self._state = _mix64(self.seed ^ _mix64((self.stream_id + 1) * _GOLDEN & _MASK64))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def derive(self, *keys: int) -> "RngStream":
        """Child stream keyed by ``(seed, stream_id, *keys)``.

        Independent of this stream's consumption state, so deriving before or
        after any number of draws yields the same child sequence.
        """
        sid = self.stream_id
        for key in keys:
            key = check_seed(key, "derive key")
            sid = _mix64(sid ^ _mix64((key + 1) * _GOLDEN & _MASK64))
        return RngStream(self.seed, sid)

    def clone(self) -> "RngStream":
        """Copy this stream including its current position."""
        other = RngStream.__new__(RngStream)
        other.seed = self.seed
        other.stream_id = self.stream_id
        other._state = self._state
        return other

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def next_float(self) -> float:
        """Uniform draw in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) / _TWO53

    def uniform_int(self, lo: int, hi_inclusive: int) -> int:
        """Uniform integer over the closed range [lo, hi_inclusive]."""
        if lo > hi_inclusive:
            raise ValueError(f"empty integer range [{lo}, {hi_inclusive}]")
        span = hi_inclusive - lo + 1
        if span == 1:
            return lo
        # Rejection sampling keeps the draw exactly uniform over the span.
        threshold = ((_MASK64 + 1) - span) % span
        while True:
            r = self.next_u64()
            if r >= threshold:
                return lo + (r % span)

    def permutation(self, n: int) -> list[int]:
        """Uniform permutation of [0, n) via Fisher-Yates."""
        if n < 1:
            raise ValueError(f"permutation size must be >= 1, got {n}")
        out = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.uniform_int(0, i)
            out[i], out[j] = out[j], out[i]
        return out

    def normal(self) -> float:
        """Standard normal draw (Box-Muller, cosine branch)."""
        u1 = 1.0 - self.next_float()  # (0, 1], keeps log finite
        u2 = self.next_float()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)

    def gamma(self, shape: float) -> float:
        """Gamma(shape, 1) draw for shape >= 1 (Marsaglia-Tsang squeeze)."""
        if shape < 1.0:
            raise ValueError(f"gamma shape must be >= 1, got {shape}")
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            t = 1.0 + c * x
            if t <= 0.0:
                continue
            v = t * t * t
            u = self.next_float()
            if u < 1.0 - 0.0331 * x * x * x * x:
                return d * v
            if u <= 0.0 or math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v

    def beta(self, beta: float) -> float:
        """Symmetric Beta(beta, beta) draw in [0, 1].

        ``beta == 0`` is the degenerate limit: a fair draw over {0.0, 1.0}.
        """
        beta = check_beta(beta)
        if beta == 0.0:
            return 1.0 if self.next_float() < 0.5 else 0.0
        if beta < 1.0:
            # Joehnk: accept (u^(1/b), v^(1/b)) pairs inside the unit simplex.
            inv = 1.0 / beta
            while True:
                x = self.next_float() ** inv
                y = self.next_float() ** inv
                s = x + y
                if 0.0 < s <= 1.0:
                    return x / s
        g1 = self.gamma(beta)
        g2 = self.gamma(beta)
        return g1 / (g1 + g2)
