"""Deterministic random bits.

All randomized routines in the package draw from SplitMix64 so that a seed
pins down every output bit regardless of platform or Python hash
randomization.  The generator is the standard splitmix64 finalizer
(Steele, Lea, Flood 2014); it passes BigCrush and is trivial to port.
"""

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit deterministic generator with a single word of state."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def chance(self, p: float) -> bool:
        """True with probability p (0 <= p <= 1)."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("probability must lie in [0, 1]")
        threshold = int(p * (1 << 64))
        return self.next_u64() < threshold

    def distinct_pair(self, n: int) -> tuple[int, int]:
        """Uniform unordered pair of distinct integers from [0, n), returned sorted."""
        if n < 2:
            raise ValueError("need n >= 2 for a distinct pair")
        i = self.below(n)
        j = self.below(n - 1)
        if j >= i:
            j += 1
        return (i, j) if i < j else (j, i)
