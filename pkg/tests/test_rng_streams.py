import numpy as np
import pytest

from rng_streams import CounterStream, batch_uniforms, mix64, stream_keys


class TestCounterStream:

    def test_reproducible(self):
        a = CounterStream(42, 3).uniforms(10)
        b = CounterStream(42, 3).uniforms(10)
        np.testing.assert_array_equal(a, b)

    def test_continues_where_it_stopped(self):
        whole = CounterStream(42, 3).uniforms(6)
        split = CounterStream(42, 3)
        np.testing.assert_array_equal(np.concatenate([split.uniforms(2), split.uniforms(4)]), whole)

    def test_trials_differ(self):
        assert not np.array_equal(CounterStream(42, 0).uniforms(4), CounterStream(42, 1).uniforms(4))

    def test_seeds_differ(self):
        assert not np.array_equal(CounterStream(1, 0).uniforms(4), CounterStream(2, 0).uniforms(4))

    def test_unit_interval(self):
        u = CounterStream(0, 0).uniforms(10_000)
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.02

    def test_large_seed_wraps(self):
        np.testing.assert_array_equal(CounterStream(2 ** 64 + 5, 1).uniforms(3), CounterStream(5, 1).uniforms(3))

    def test_single_uniform(self):
        assert isinstance(CounterStream(9, 9).uniform(), float)


class TestBatch:

    @pytest.mark.parametrize("start, count, draws", [(0, 5, 3), (4096, 7, 9), (10 ** 6, 2, 1)])
    def test_rows_match_streams(self, start, count, draws):
        batch = batch_uniforms(77, start, count, draws)
        assert batch.shape == (count, draws)
        for r in range(count):
            np.testing.assert_array_equal(batch[r], CounterStream(77, start + r).uniforms(draws))

    def test_block_boundaries_do_not_matter(self):
        whole = batch_uniforms(5, 0, 10, 2)
        parts = np.vstack([batch_uniforms(5, 0, 3, 2), batch_uniforms(5, 3, 7, 2)])
        np.testing.assert_array_equal(whole, parts)


class TestMixing:

    def test_known_zero(self):
        assert mix64([0])[0] == 0

    def test_keys_are_distinct(self):
        keys = stream_keys(1, np.arange(1000, dtype=np.uint64))
        assert len(set(keys.tolist())) == 1000
