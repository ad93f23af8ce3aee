"""Seeded xoshiro256** generator.

Used for every randomized test artifact (directions, manufactured
coefficients) so that scenario output is reproducible across platforms and
backends.  State is seeded from a 64-bit integer through splitmix64.
"""

MASK64 = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """64-bit xoshiro256** with splitmix64 seeding."""

    def __init__(self, seed: int):
        s = int(seed) & MASK64
        self.s = []
        for _ in range(4):
            s, out = _splitmix64(s)
            self.s.append(out)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def uniform(self, lo=0.0, hi=1.0) -> float:
        # 53-bit mantissa draw in [0, 1)
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u * (1.0 / (1 << 53)))

    def uniforms(self, n, lo=0.0, hi=1.0):
        return [self.uniform(lo, hi) for _ in range(n)]
