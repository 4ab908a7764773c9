import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bacs import (CodecConfig, ConfigError, MeasurementSet, BlockMap,
                  block_view, blocks_to_frame, config_values, frame_to_blocks,
                  measurement_rows, pad_frame, parse_config, wire_ratio)


class TestPadFrame:
    def test_hd_padding(self):
        f = pad_frame(np.zeros((720, 1280)), 32)
        assert (f.padded_width, f.padded_height) == (1280, 736)
        assert f.block_count == 40 * 23 == 920

    def test_already_multiple_unchanged(self):
        raw = np.arange(64 * 64, dtype=np.float64).reshape(64, 64)
        f = pad_frame(raw, 32)
        assert f.pixels.shape == (64, 64)
        assert f.block_count == 4
        assert np.array_equal(f.pixels, raw)

    def test_edge_replication(self):
        raw = np.random.default_rng(0).uniform(0, 255, size=(33, 33))
        f = pad_frame(raw, 32)
        assert f.pixels.shape == (64, 64)
        assert f.pixels[40, 40] == raw[32, 32]
        assert f.pixels[40, 10] == raw[32, 10]

    def test_original_region_identity(self):
        raw = np.random.default_rng(1).uniform(0, 255, size=(50, 70))
        f = pad_frame(raw, 32)
        assert np.array_equal(f.original_region(), raw)

    @settings(max_examples=60, deadline=None)
    @given(h=st.integers(1, 90), w=st.integers(1, 90),
           b=st.sampled_from([8, 16, 32]), seed=st.integers(0, 10))
    def test_pad_crop_identity_property(self, h, w, b, seed):
        raw = np.random.default_rng(seed).uniform(0, 255, size=(h, w))
        f = pad_frame(raw, b)
        assert f.padded_height % b == 0 and f.padded_width % b == 0
        assert f.padded_height - h < b and f.padded_width - w < b
        assert np.array_equal(f.original_region(), raw)

    def test_zero_sized_rejected(self):
        with pytest.raises(ValueError):
            pad_frame(np.zeros((0, 10)), 32)

    def test_rgb_converts_to_luma(self):
        rgb = np.zeros((16, 16, 3))
        rgb[..., 1] = 100.0
        f = pad_frame(rgb, 8)
        assert np.allclose(f.pixels, 58.7)

    def test_pixels_immutable(self):
        f = pad_frame(np.zeros((16, 16)), 8)
        with pytest.raises(ValueError):
            f.pixels[0, 0] = 1.0


class TestBlockView:
    def test_constant_frame(self):
        f = pad_frame(np.full((64, 64), 128.0), 32)
        for idx in range(4):
            assert np.all(block_view(f, idx) == 128.0)

    def test_bottom_right_block(self):
        raw = np.arange(64 * 64, dtype=np.float64).reshape(64, 64)
        f = pad_frame(raw, 32)
        expect = raw[32:, 32:].reshape(-1)
        assert np.array_equal(block_view(f, 3), expect)

    def test_out_of_range(self):
        f = pad_frame(np.zeros((64, 64)), 32)
        with pytest.raises(ValueError):
            block_view(f, 4)
        with pytest.raises(ValueError):
            block_view(f, -1)

    def test_partition_reassembles_frame(self):
        raw = np.random.default_rng(2).uniform(0, 255, size=(40, 70))
        f = pad_frame(raw, 16)
        rebuilt = np.empty_like(f.pixels)
        for idx in range(f.block_count):
            r, c = divmod(idx, f.blocks_across)
            rebuilt[r * 16:(r + 1) * 16, c * 16:(c + 1) * 16] = \
                block_view(f, idx).reshape(16, 16)
        assert np.array_equal(rebuilt, f.pixels)

    def test_blocks_round_trip(self):
        img = np.random.default_rng(3).uniform(0, 255, size=(48, 80))
        blocks = frame_to_blocks(img, 16)
        assert blocks.shape == (15, 256)
        assert np.array_equal(blocks_to_frame(blocks, 48, 80, 16), img)
        f = pad_frame(img, 16)
        for idx in (0, 7, 14):
            assert np.array_equal(blocks[idx], block_view(f, idx))


class TestCodecConfig:
    def test_defaults_valid(self):
        cfg = CodecConfig()
        assert cfg.block_size == 32 and cfg.high_sr == 0.2

    def test_high_must_exceed_target(self):
        with pytest.raises(ConfigError):
            CodecConfig(high_sr=0.05, target_sr=0.05)
        with pytest.raises(ConfigError):
            CodecConfig(high_sr=0.04, target_sr=0.05)

    def test_needs_two_rows(self):
        # floor(0.02 * 64) = 1 row: too few to carry any detail
        with pytest.raises(ConfigError):
            CodecConfig(block_size=8, high_sr=0.02, target_sr=0.01)

    def test_threshold_ordering(self):
        with pytest.raises(ConfigError):
            CodecConfig(threshold_min=0.05, threshold_init=0.04)
        with pytest.raises(ConfigError):
            CodecConfig(threshold_max=0.03, threshold_init=0.04)
        with pytest.raises(ConfigError):
            CodecConfig(threshold_min=0.0)

    def test_small_blocks_rejected(self):
        with pytest.raises(ConfigError):
            CodecConfig(block_size=4)

    def test_single_frame_rejected(self):
        with pytest.raises(ConfigError):
            CodecConfig(frame_count=1)
        CodecConfig(frame_count=0)
        CodecConfig(frame_count=2)

    def test_solver_ranges(self):
        with pytest.raises(ConfigError):
            CodecConfig(solver_step=1.5)
        with pytest.raises(ConfigError):
            CodecConfig(solver_decay=1.0)
        with pytest.raises(ConfigError):
            CodecConfig(solver_iterations=0)

    def test_rows_high(self):
        assert CodecConfig(block_size=32, high_sr=0.2, target_sr=0.01).rows_high == 204
        assert CodecConfig(block_size=32, high_sr=0.25, target_sr=0.01).rows_high == 256


class TestWireRatio:
    def test_rounds_down(self):
        for x in (0.2, 0.05, 0.1, 0.3, 1 / 3):
            w = wire_ratio(x)
            assert w <= x
            assert float(np.float32(w)) == w    # representable
            # the next f32 up exceeds x
            assert float(np.nextafter(np.float32(w), np.float32(2.0))) > x

    def test_exact_values_pass_through(self):
        assert wire_ratio(0.25) == 0.25
        assert wire_ratio(0.5) == 0.5

    def test_row_counts(self):
        assert measurement_rows(wire_ratio(0.2), 32) == 204
        assert measurement_rows(wire_ratio(0.05), 32) == 51
        assert measurement_rows(wire_ratio(0.25), 32) == 256


class TestConfigFile:
    def test_parse_round_trip(self):
        text = """
        # comment line
        block_size = 16
        high_sr = 0.3       # inline comment
        target_sr = 0.05
        seed = 42
        """
        cfg = parse_config(text)
        assert cfg == CodecConfig(block_size=16, high_sr=0.3, target_sr=0.05, seed=42)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_config("bogus_key = 1\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("seed = 1\nseed = 2\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="bad value"):
            parse_config("high_sr = fast\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="key=value"):
            parse_config("block_size 16\n")

    def test_values_dict(self):
        vals = config_values("block_size=8\nsolver_iterations=5\n")
        assert vals == {"block_size": 8, "solver_iterations": 5}
        assert all(isinstance(v, int) for v in vals.values())


class TestMeasurementSet:
    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            MeasurementSet(frame_index=0,
                           per_block=(np.zeros(3, np.float32),),
                           block_map=BlockMap(flags=np.ones(2, dtype=bool)),
                           sr_m=0.2, threshold_used=0.04)

    def test_total_scalars(self):
        mset = MeasurementSet(
            frame_index=1,
            per_block=(np.zeros(5, np.float32), np.empty(0, np.float32),
                       np.zeros(5, np.float32)),
            block_map=BlockMap(flags=np.array([True, False, True])),
            sr_m=0.1, threshold_used=0.04)
        assert mset.total_scalars() == 10
        assert mset.block_map.moving_count == 2
