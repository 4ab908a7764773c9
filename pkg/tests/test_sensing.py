import numpy as np
import pytest

from bacs import (BlockMap, CodecConfig, MeasurementSet, build_operator,
                  cut_length, cut_measurements, measure_block, measure_blocks)


def _mset(vectors, flags=None):
    vectors = tuple(np.asarray(v, dtype=np.float32) for v in vectors)
    if flags is None:
        flags = np.ones(len(vectors), dtype=bool)
    return MeasurementSet(frame_index=0, per_block=vectors,
                          block_map=BlockMap(flags=np.asarray(flags, bool)),
                          sr_m=0.2, threshold_used=0.04)


class TestBuildOperator:
    def test_shape_204_rows(self, op32):
        assert op32.rows.shape == (204, 1024)
        assert op32.row_count == 204 and op32.signal_size == 1024

    def test_dc_row(self, op32):
        assert np.all(op32.rows[0] == 1.0 / 32)

    def test_orthonormality(self, op32, op16):
        for op in (op32, op16):
            g = op.rows @ op.rows.T
            assert np.abs(g - np.eye(op.row_count)).max() <= 1e-6

    def test_constant_block_hits_dc_only(self, op32):
        y = measure_block(op32, np.full(1024, 7.0), 204)
        assert y[0] == pytest.approx(7.0 * 32, rel=1e-12)
        assert np.abs(y[1:]).max() <= 1e-5

    def test_determinism(self, cfg32):
        a = build_operator(cfg32, seed=123)
        b = build_operator(cfg32, seed=123)
        assert np.array_equal(a.rows, b.rows)

    def test_seed_changes_rows(self, cfg32):
        a = build_operator(cfg32, seed=1)
        b = build_operator(cfg32, seed=2)
        assert not np.array_equal(a.rows[1:], b.rows[1:])

    def test_rows_immutable(self, op32):
        with pytest.raises(ValueError):
            op32.rows[0, 0] = 1.0


class TestMeasure:
    def test_zero_block(self, op16):
        assert np.all(measure_block(op16, np.zeros(256), op16.row_count) == 0.0)

    def test_linearity(self, op16):
        rng = np.random.default_rng(0)
        u = rng.uniform(-1, 1, 256)
        v = rng.uniform(-1, 1, 256)
        lhs = measure_block(op16, 3.0 * u - 2.0 * v, 40)
        rhs = 3.0 * measure_block(op16, u, 40) - 2.0 * measure_block(op16, v, 40)
        assert np.abs(lhs - rhs).max() <= 1e-5 * max(1.0, np.abs(rhs).max())

    def test_against_dense_oracle(self):
        # 8x8 blocks are small enough to check against row-by-row dot products
        cfg = CodecConfig(block_size=8, high_sr=0.25, target_sr=0.05)
        op = build_operator(cfg, seed=7)
        rng = np.random.default_rng(1)
        for _ in range(5):
            x = rng.uniform(0, 255, 64)
            oracle = np.array([np.dot(row, x) for row in op.rows])
            assert np.abs(measure_block(op, x, op.row_count) - oracle).max() <= 1e-9

    def test_prefix_nesting_exact(self, op32):
        x = np.random.default_rng(2).uniform(0, 255, 1024)
        full = measure_block(op32, x, 204)
        for m in (1, 5, 51, 100, 203):
            assert np.array_equal(measure_block(op32, x, m), full[:m])

    def test_batched_matches_prefix(self, op16):
        blocks = np.random.default_rng(3).uniform(0, 255, size=(9, 256))
        full = measure_blocks(op16, blocks, op16.row_count)
        for m in (1, 7, op16.row_count - 1):
            assert np.array_equal(measure_blocks(op16, blocks, m), full[:, :m])

    def test_energy_bound(self, op32):
        rng = np.random.default_rng(4)
        for _ in range(10):
            x = rng.uniform(-255, 255, 1024)
            y = measure_block(op32, x, 204)
            assert np.linalg.norm(y) <= np.linalg.norm(x) * (1 + 1e-5)

    def test_row_count_range(self, op16):
        x = np.zeros(256)
        with pytest.raises(ValueError):
            measure_block(op16, x, 0)
        with pytest.raises(ValueError):
            measure_block(op16, x, op16.row_count + 1)

    def test_wrong_block_size(self, op16):
        with pytest.raises(ValueError):
            measure_block(op16, np.zeros(64), 4)


class TestCut:
    def test_cut_length_values(self):
        assert cut_length(204, 0.25) == 51
        assert cut_length(3, 0.25) == 1      # floor gives 0, clamped to DC row
        assert cut_length(10, 1.0) == 10

    def test_cut_prefixes(self):
        vecs = [np.arange(8, dtype=np.float32), np.arange(20, dtype=np.float32)]
        out = cut_measurements(_mset(vecs), 0.25)
        assert np.array_equal(out[0], [0, 1])
        assert np.array_equal(out[1], [0, 1, 2, 3, 4])

    def test_cut_of_cut_is_prefix(self):
        vec = np.arange(100, dtype=np.float32)
        first = cut_measurements(_mset([vec]), 0.25)[0]
        second = cut_measurements(_mset([first]), 0.25)[0]
        assert np.array_equal(second, first[: len(second)])

    def test_empty_vector_rejected(self):
        mset = _mset([np.empty(0, np.float32)], flags=[False])
        with pytest.raises(ValueError):
            cut_measurements(mset, 0.25)
