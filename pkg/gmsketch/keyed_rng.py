"""
Keyed random streams.

Every random value used while sketching comes from a stream keyed by
(global seed, element index, ball counter). Weights never enter a key, so two
vectors sharing element i consume exactly the same draws for it.

The generator is SplitMix64: the key is folded into a 64-bit starting state
through the SplitMix64 finaliser, and each draw advances the state by the
golden-ratio increment and finalises it again. Period is 2**64 per key. Test
vectors in tests/test_keyed_rng.py pin the exact outputs, so none of the
constants below may change.
"""
import math
from typing import NamedTuple

from .errors import InvalidArgumentError

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

_KEY_SEED = 0x2545F4914F6CDD1D
_KEY_INDEX = 0xD1B54A32D192ED03
_KEY_BALLS = 0x8CB92BA72F3D8DD7

_TWO_M53 = 1.0 / (1 << 53)
# ln() of this is about -744.4, finite
_TINY = math.ulp(0.0)

# Shapes up to this are summed exponentials, above it Marsaglia-Tsang
GAMMA_SUM_LIMIT = 8


def mix64(z):
    """SplitMix64 finaliser, a bijection on 64-bit integers"""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class StreamKey(NamedTuple):
    global_seed: int
    element_index: int
    ball_counter: int

    def state(self):
        """Starting generator state for this key"""
        h = mix64((self.global_seed ^ _KEY_SEED) & MASK64)
        h = mix64((h + self.element_index * _KEY_INDEX) & MASK64)
        return mix64((h + self.ball_counter * _KEY_BALLS) & MASK64)


class RandomStream(object):
    """A SplitMix64 generator positioned `draw_count` draws into the stream of
    its key. Not safe to share between concurrent consumers."""

    __slots__ = ("key", "draw_count", "_state")

    def __init__(self, key):
        self.key = key
        self.draw_count = 0
        self._state = key.state()

    def next_raw(self):
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        self.draw_count += 1
        return mix64(self._state)

    def __repr__(self):
        return "RandomStream(%r, draw_count=%d)" % (self.key, self.draw_count)


def derive_stream(key):
    return RandomStream(key)


def stream_for(global_seed, element_index, ball_counter):
    return RandomStream(StreamKey(global_seed, element_index, ball_counter))


def next_uniform(stream):
    """Uniform on (0, 1); a zero draw is remapped to the smallest positive
    double so that log(u) stays finite"""
    u = (stream.next_raw() >> 11) * _TWO_M53
    return u if u > 0.0 else _TINY


def next_int(stream, m):
    """Uniform integer in {1, ..., m}"""
    if m < 1:
        raise InvalidArgumentError("next_int needs m >= 1, got %r" % (m,))
    return 1 + ((stream.next_raw() * m) >> 64)


def _next_normal(stream):
    # Box-Muller, cosine branch only so draw consumption stays fixed at two
    r = math.sqrt(-2.0 * math.log(next_uniform(stream)))
    return r * math.cos(2.0 * math.pi * next_uniform(stream))


def next_gamma(stream, shape):
    """Gamma(shape, 1) for a positive integer shape"""
    if shape < 1:
        raise InvalidArgumentError(
            "next_gamma needs an integer shape >= 1, got %r" % (shape,))

    if shape <= GAMMA_SUM_LIMIT:
        x = 0.0
        for _ in range(shape):
            x -= math.log(next_uniform(stream))
        return x

    # Marsaglia & Tsang (2000)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        g = _next_normal(stream)
        t = 1.0 + c * g
        if t <= 0.0:
            continue
        t = t * t * t
        u = next_uniform(stream)
        if math.log(u) < 0.5 * g * g + d - d * t + d * math.log(t):
            return d * t


def leading_uniforms(global_seed, element_index, count):
    """First uniform of each stream (global_seed, element_index, z) for
    z = 0..count-1, i.e. next_uniform(stream_for(...)) without building the
    streams"""
    h = mix64((global_seed ^ _KEY_SEED) & MASK64)
    h = mix64((h + element_index * _KEY_INDEX) & MASK64)
    out = []
    for z in range(count):
        state = (mix64((h + z * _KEY_BALLS) & MASK64) + GOLDEN_GAMMA) & MASK64
        u = (mix64(state) >> 11) * _TWO_M53
        out.append(u if u > 0.0 else _TINY)
    return out
