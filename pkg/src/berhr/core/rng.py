"""Counter-based SplitMix64 streams.

Every replication owns one stream.  The n-th uniform of a stream seeded with
``s`` is ``mix(s + (n + 1) * GAMMA)``, so any block of uniforms can be computed
directly from its counter.  That lets a batch of replications advance in
lock-step with numpy while each replication stays bit-identical to a run on
its own.
"""

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1

_GAMMA_U = np.uint64(GAMMA)
_M1_U = np.uint64(_M1)
_M2_U = np.uint64(_M2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 2.0 ** -53


def _mix_int(z):
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def splitmix64(state):
    """Return ``(next_state, output)`` of one SplitMix64 step on a Python int."""
    state = (state + GAMMA) & MASK64
    return state, _mix_int(state)


def replication_seed(master_seed, index):
    """Per-replication seed: first SplitMix64 output after ``master_seed XOR index``."""
    if not 0 <= master_seed <= MASK64:
        raise ValueError("master seed must be an unsigned 64-bit integer")
    return splitmix64((master_seed ^ index) & MASK64)[1]


def replication_seeds(master_seed, indices):
    """Vector of per-replication seeds for the given replication indices."""
    return np.array([replication_seed(master_seed, int(i)) for i in indices], dtype=np.uint64)


def _mix_array(z):
    # in place: z is a fresh uint64 buffer
    z ^= z >> _S30
    z *= _M1_U
    z ^= z >> _S27
    z *= _M2_U
    z ^= z >> _S31
    return z


def _uniform_block(seeds, counters):
    """Uniforms laid out ``(len(counters), len(seeds))``."""
    with np.errstate(over="ignore"):
        z = (counters[:, None] + np.uint64(1)) * _GAMMA_U + seeds[None, :]
        _mix_array(z)
    z >>= _S11
    out = z.astype(np.float64)
    out *= _INV53
    return out


def uniforms_at(seeds, counters):
    """Uniforms on [0, 1) for every (seed, counter) pair, shape ``(len(seeds), len(counters))``."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    return _uniform_block(seeds, counters).T


class UniformStream:
    """Per-step uniforms for a batch of replications.

    Step ``t`` of every replication reads counters ``t*width .. t*width+width-1``.
    Uniforms are generated up to ``block`` steps at a time, fewer when the
    batch is wide (keeps the working buffer cache-sized).  Values never depend
    on the block size.
    """

    CACHE_ELEMENTS = 65536

    def __init__(self, seeds, width, block=256):
        self.seeds = np.asarray(seeds, dtype=np.uint64)
        self.width = int(width)
        per_step = max(1, self.width * len(self.seeds))
        self.block = max(1, min(int(block), self.CACHE_ELEMENTS // per_step))
        self._start = None
        self._buf = None

    def step(self, t):
        """Uniforms of step ``t``, shape ``(n_replications, width)``."""
        if self.width == 0:
            return np.empty((len(self.seeds), 0))
        if self._start is None or not self._start <= t < self._start + self.block:
            self._start = t - t % self.block
            first = self._start * self.width
            counters = np.arange(first, first + self.block * self.width, dtype=np.uint64)
            self._buf = _uniform_block(self.seeds, counters).reshape(self.block, self.width, len(self.seeds))
        return self._buf[t - self._start].T
