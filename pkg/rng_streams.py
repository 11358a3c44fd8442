"""
Counter-based random streams.

Trial ``j`` under master seed ``s`` owns the stream keyed by
``mix64(s + (j + 1) * GOLDEN_GAMMA)``; its ``c``-th draw is
``mix64(key + (c + 1) * GOLDEN_GAMMA)`` mapped to a double in [0, 1).
Nothing depends on which worker evaluates a trial, so results are identical
for any degree of parallelism. ``batch_uniforms`` produces the same numbers
as the per-trial ``CounterStream`` for a whole block of trials at once.
"""
import numpy as np

# --- SPLITMIX64 CONSTANTS ---
GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX_C1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_C2 = np.uint64(0x94D049BB133111EB)
UINT64_MASK = (1 << 64) - 1
DOUBLE_SCALE = 2.0 ** -53


def mix64(values):
    """SplitMix64 finalizer, elementwise over a uint64 array (wrapping arithmetic)."""
    z = np.array(values, dtype=np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * MIX_C1
        z = (z ^ (z >> np.uint64(27))) * MIX_C2
    return z ^ (z >> np.uint64(31))


def _offsets(indices):
    with np.errstate(over="ignore"):
        return (np.asarray(indices, dtype=np.uint64) + np.uint64(1)) * GOLDEN_GAMMA


def stream_keys(master_seed, trial_indices):
    seed = np.uint64(int(master_seed) & UINT64_MASK)
    with np.errstate(over="ignore"):
        return mix64(seed + _offsets(trial_indices))


def _to_unit_interval(words):
    return (words >> np.uint64(11)).astype(np.float64) * DOUBLE_SCALE


class CounterStream:
    """
    One trial's random stream. Not thread-safe: give each thread its own.

    Args:
        master_seed (int): the experiment's 64-bit seed.
        trial_index (int): which trial this stream belongs to.
    """

    def __init__(self, master_seed, trial_index):
        self.master_seed = int(master_seed) & UINT64_MASK
        self.trial_index = int(trial_index)
        self.key = stream_keys(self.master_seed, [self.trial_index])[0]
        self.counter = 0

    def uniforms(self, count):
        draws = np.arange(self.counter, self.counter + count, dtype=np.uint64)
        self.counter += count
        with np.errstate(over="ignore"):
            words = mix64(self.key + _offsets(draws))
        return _to_unit_interval(words)

    def uniform(self):
        return float(self.uniforms(1)[0])


def batch_uniforms(master_seed, trial_start, trial_count, draws):
    """
    First ``draws`` uniforms of trials ``trial_start .. trial_start + trial_count - 1``.

    Returns:
        np.ndarray: shape ``(trial_count, draws)``; row r equals
        ``CounterStream(master_seed, trial_start + r).uniforms(draws)``.
    """
    keys = stream_keys(master_seed, np.arange(trial_start, trial_start + trial_count, dtype=np.uint64))
    offsets = _offsets(np.arange(draws, dtype=np.uint64))
    with np.errstate(over="ignore"):
        words = mix64(keys[:, None] + offsets[None, :])
    return _to_unit_interval(words)
