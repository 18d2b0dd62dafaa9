"""Portable pseudorandom generator used for instance generation.

The generator is SplitMix64.  With 64-bit unsigned wraparound arithmetic the
state advances as ``s <- s + 0x9E3779B97F4A7C15`` and each output is::

    z = s
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

Bounded integers in ``[0, n)`` use rejection sampling on the raw 64-bit
output: draws ``x >= 2**64 - (2**64 % n)`` are discarded and ``x % n`` is
returned.  A fair coin is the top bit of one raw output.  Any implementation
following these three rules reproduces the same instances bit for bit.
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(*parts):
    """Hash a tuple of ints/strings/floats into a 64-bit seed.

    Used to give every (base seed, algorithm, alpha, index) job its own
    reproducible stream without sharing generator state.
    """
    h = 0x6A09E667F3BCC909
    for part in parts:
        data = repr(part).encode()
        for byte in data:
            h = mix64(((h ^ byte) + GOLDEN_GAMMA) & MASK64)
        h = mix64((h + GOLDEN_GAMMA) & MASK64)
    return h


class SplitMix64:
    def __init__(self, seed=0):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def below(self, n):
        """Uniform integer in ``[0, n)`` without modulo bias."""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def coin(self):
        return self.next_u64() >> 63

    def random(self):
        """Uniform float in ``[0, 1)`` with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))
