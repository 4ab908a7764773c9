"""Block-adaptive compressive video codec with average-sampling-rate control.

Frames are sensed block-by-block with a nested measurement operator; a
measurement-domain detector picks out moving blocks, a storage-based rate
controller holds the stream to a target average sampling ratio, and a
cooperative proximal-gradient solver reconstructs the frames.
"""

__version__ = "0.1.0"

from .bitstream import (StreamError, StreamFormatError, StreamHeader,
                        StreamMagicError, StreamTrailingError,
                        StreamTruncatedError, StreamVersionError, audit_sr,
                        read_stream, rows_for, write_stream)
from .control import (BudgetError, ControllerState, allocate,
                      budget_constants, initial_state, quantize_rows,
                      update_threshold)
from .frameio import (VideoIOError, read_frames, read_pgm, read_pgm_dir,
                      read_raw, write_pgm, write_pgm_dir, write_raw)
from .metrics import psnr, ssim
from .model import (BacsError, BlockMap, CodecConfig, ConfigError, Frame,
                    MeasurementSet, block_view, blocks_to_frame, config_values,
                    frame_to_blocks, measurement_rows, pad_frame, parse_config,
                    wire_ratio)
from .motion import DetectionInput, block_scores, classify
from .pipeline import (DecodeResult, EncodeResult, RunReport, SweepRow,
                       TraceRow, decode, encode, run, sequence_metrics, sweep,
                       sweep_csv, trace_csv)
from .recon import ReferenceBuffer, assemble, data_gradient, reconstruct, soft_threshold
from .sensing import (SamplingOperator, build_operator, cut_length,
                      cut_measurements, measure_block, measure_blocks)
from .synth import motion_steps, synthetic_video

__all__ = [
    "__version__",
    "BacsError", "ConfigError", "BudgetError", "VideoIOError",
    "StreamError", "StreamMagicError", "StreamVersionError",
    "StreamTruncatedError", "StreamTrailingError", "StreamFormatError",
    "CodecConfig", "config_values", "parse_config",
    "Frame", "BlockMap", "MeasurementSet", "StreamHeader",
    "pad_frame", "block_view", "frame_to_blocks", "blocks_to_frame",
    "wire_ratio", "measurement_rows",
    "SamplingOperator", "build_operator", "measure_block", "measure_blocks",
    "cut_length", "cut_measurements",
    "DetectionInput", "block_scores", "classify",
    "ControllerState", "budget_constants", "initial_state", "allocate",
    "update_threshold", "quantize_rows",
    "ReferenceBuffer", "assemble", "soft_threshold", "data_gradient",
    "reconstruct",
    "psnr", "ssim",
    "read_stream", "write_stream", "audit_sr", "rows_for",
    "read_frames", "read_pgm", "read_pgm_dir", "read_raw",
    "write_pgm", "write_pgm_dir", "write_raw",
    "TraceRow", "EncodeResult", "DecodeResult", "RunReport", "SweepRow",
    "encode", "decode", "run", "sweep", "sequence_metrics",
    "trace_csv", "sweep_csv",
    "synthetic_video", "motion_steps",
]
