"""Seeded generator: determinism, range, and frozen reference outputs."""

import numpy as np

from surfcalc.rng import Xoshiro256StarStar, _splitmix64

# regression pin: first outputs for seed 42, frozen so every seeded artifact
# reproduces across platforms
SEED42_FIRST = [
    1546998764402558742,
    6990951692964543102,
    12544586762248559009,
]


def test_splitmix64_published_vector():
    # first three outputs of the reference stream seeded with zero
    s = 0
    outs = []
    for _ in range(3):
        s, z = _splitmix64(s)
        outs.append(z)
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_determinism_and_reference_values():
    a = Xoshiro256StarStar(42)
    b = Xoshiro256StarStar(42)
    outs = [a.next_u64() for _ in range(3)]
    assert outs == [b.next_u64() for _ in range(3)]
    assert outs == SEED42_FIRST


def test_different_seeds_differ():
    a = Xoshiro256StarStar(1)
    b = Xoshiro256StarStar(2)
    assert [a.next_u64() for _ in range(4)] != [b.next_u64() for _ in range(4)]


def test_uniform_range_and_moments():
    rng = Xoshiro256StarStar(7)
    xs = np.array(rng.uniforms(4000))
    assert xs.min() >= 0.0 and xs.max() < 1.0
    assert abs(xs.mean() - 0.5) < 0.02
    assert abs(xs.var() - 1.0 / 12.0) < 0.005
    ys = np.array(rng.uniforms(100, -2.0, 3.0))
    assert ys.min() >= -2.0 and ys.max() < 3.0


def test_outputs_fit_in_64_bits():
    rng = Xoshiro256StarStar(123456789)
    for _ in range(100):
        v = rng.next_u64()
        assert 0 <= v < (1 << 64)
