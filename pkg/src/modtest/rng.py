"""Portable deterministic RNG.

A splitmix64 stream: the same 64-bit seed yields the same sequence on every
platform, which keeps "random" perturbations byte-reproducible.
"""

MASK64 = (1 << 64) - 1


class Rng:
    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * (self.next_u64() / 2**64)

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return self.next_u64() % n

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def fork(self) -> "Rng":
        """Independent child stream; advances this stream by one draw."""
        return Rng(self.next_u64())


def mix_seed(base: int, *salts: int) -> int:
    """Derive a child seed from a base seed and integer salts, stably."""
    s = base & MASK64
    for salt in salts:
        r = Rng(s ^ ((salt & MASK64) * 0x9E3779B97F4A7C15 & MASK64))
        s = r.next_u64()
    return s
