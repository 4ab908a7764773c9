"""Command-line front end: encode, decode, run, sweep, synth.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 corrupt stream.
Config precedence: built-in defaults < --config file < individual flags.
"""

import argparse
import sys
from dataclasses import fields

from . import __version__
from .bitstream import StreamError
from .control import BudgetError
from .frameio import VideoIOError, read_frames, write_pgm_dir
from .model import CodecConfig, ConfigError, config_values, _INT_FIELDS
from .pipeline import decode, encode, run, sweep, sweep_csv, trace_csv
from .synth import synthetic_video

_EXIT_CONFIG = 2
_EXIT_IO = 3
_EXIT_STREAM = 4


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="key=value config file")
    for f in fields(CodecConfig):
        flag = "--" + f.name.replace("_", "-")
        kind = int if f.name in _INT_FIELDS else float
        p.add_argument(flag, type=kind, default=None, metavar="V",
                       help=f"override {f.name} (default {f.default})")


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True,
                   help="PGM directory, or raw luma file with --format raw")
    p.add_argument("--format", choices=("pgm", "raw"), default="pgm")
    p.add_argument("--width", type=int, default=0, help="frame width (raw input)")
    p.add_argument("--height", type=int, default=0, help="frame height (raw input)")


def _add_ablation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-bss", action="store_true",
                   help="disable the storage system: every moving block at high_sr")
    p.add_argument("--no-dt", action="store_true",
                   help="freeze the detection threshold at threshold_init")


def _build_config(args) -> CodecConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"{args.config}: {exc.strerror or exc}") from exc
        values = config_values(text)
    for f in fields(CodecConfig):
        override = getattr(args, f.name, None)
        if override is not None:
            values[f.name] = override
    return CodecConfig(**values)


def _load_input(args, cfg: CodecConfig):
    return read_frames(args.input, args.format, width=args.width,
                       height=args.height, count=cfg.frame_count)


def _write_bytes(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc


def _cmd_encode(args) -> int:
    cfg = _build_config(args)
    frames = _load_input(args, cfg)
    enc = encode(frames, cfg, use_bss=not args.no_bss, use_dt=not args.no_dt)
    _write_bytes(args.output, enc.stream)
    if args.trace:
        _write_text(args.trace, trace_csv(enc.trace))
    n = enc.header.frame_count
    avg = sum(m.total_scalars() for m in enc.msets) / (
        n * enc.header.block_count * enc.header.block_size ** 2)
    print(f"encoded {n} frames -> {args.output} ({len(enc.stream)} bytes, "
          f"average SR {avg:.6f})")
    return 0


def _cmd_decode(args) -> int:
    cfg = _build_config(args)
    dec = decode(_read_bytes(args.input), cfg)
    write_pgm_dir(args.output, [f.original_region() for f in dec.frames])
    print(f"decoded {len(dec.frames)} frames -> {args.output}")
    return 0


def _cmd_run(args) -> int:
    cfg = _build_config(args)
    frames = _load_input(args, cfg)
    rep = run(frames, cfg, use_bss=not args.no_bss, use_dt=not args.no_dt,
              skip_metrics=args.skip_metrics)
    if args.output:
        _write_bytes(args.output, rep.stream)
    if args.report:
        _write_text(args.report, trace_csv(rep.trace))
    if args.recon_dir:
        if rep.recon is None:
            raise ConfigError("--recon-dir requires metrics (drop --skip-metrics)")
        write_pgm_dir(args.recon_dir, [f.original_region() for f in rep.recon])
    line = (f"frames {rep.header.frame_count}  "
            f"average SR {rep.average_sr:.6f}")
    if not args.skip_metrics:
        line += f"  mean PSNR {rep.mean_psnr:.2f} dB  mean SSIM {rep.mean_ssim:.4f}"
    print(line)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _build_config(args)
    frames = _load_input(args, cfg)
    try:
        targets = [float(t) for t in args.targets.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad --targets list: {args.targets!r}") from None
    if not targets:
        raise ConfigError("--targets must name at least one rate")
    rows = sweep(frames, cfg, targets, use_bss=not args.no_bss,
                 use_dt=not args.no_dt, skip_metrics=args.skip_metrics)
    text = sweep_csv(rows)
    if args.output:
        _write_text(args.output, text)
        print(f"wrote {len(rows)} sweep rows -> {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_synth(args) -> int:
    video = synthetic_video(width=args.width, height=args.height,
                            frames=args.frames, seed=args.seed,
                            squares=args.squares, square_size=args.square_size,
                            speed=args.speed, dither=args.dither,
                            move_frames=args.move_frames,
                            pause_frames=args.pause_frames)
    write_pgm_dir(args.output, list(video))
    print(f"wrote {len(video)} frames -> {args.output}")
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bacs",
        description="Block-adaptive compressive video codec with sampling-rate control.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode frames into a measurement stream")
    _add_input_flags(p)
    p.add_argument("--output", required=True, help="output stream file")
    p.add_argument("--trace", help="write the controller trace CSV here")
    _add_ablation_flags(p)
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_encode)

    p = sub.add_parser("decode", help="reconstruct frames from a stream")
    p.add_argument("--input", required=True, help="stream file")
    p.add_argument("--output", required=True, help="output PGM directory")
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_decode)

    p = sub.add_parser("run", help="encode + decode + quality metrics")
    _add_input_flags(p)
    p.add_argument("--output", help="also keep the stream file")
    p.add_argument("--report", help="write the per-frame report CSV here")
    p.add_argument("--recon-dir", help="write reconstructed frames here")
    p.add_argument("--skip-metrics", action="store_true",
                   help="encode only; leave psnr/ssim columns empty")
    _add_ablation_flags(p)
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="re-run the codec across target rates")
    _add_input_flags(p)
    p.add_argument("--targets", required=True,
                   help="comma-separated target rates, e.g. 0.04,0.05,0.10")
    p.add_argument("--output", help="sweep CSV path (default: stdout)")
    p.add_argument("--skip-metrics", action="store_true",
                   help="rate control only, no decode")
    _add_ablation_flags(p)
    _add_config_flags(p)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("synth", help="render the built-in synthetic sequence")
    p.add_argument("--output", required=True, help="output PGM directory")
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=128)
    p.add_argument("--frames", type=int, default=60)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--squares", type=int, default=2)
    p.add_argument("--square-size", type=int, default=32)
    p.add_argument("--speed", type=float, default=4.0)
    p.add_argument("--dither", type=float, default=1.25)
    p.add_argument("--move-frames", type=int, default=0,
                   help="frames of motion per cycle (0 = continuous)")
    p.add_argument("--pause-frames", type=int, default=0,
                   help="frozen frames per cycle")
    p.set_defaults(fn=_cmd_synth)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except VideoIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_IO
    except StreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_STREAM
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
