"""Command-line front end.

::

    magnoep run CONFIG [--format csv|json] [--out PATH] [--quiet]
    magnoep preset {fig2,fig3,fig4,fig5} [--out DIR]
    magnoep locate-ep CONFIG [--out PATH]
    magnoep validate CONFIG

Exit status is 0 on success, 1 when the config cannot be read or fails
validation, and 2 when a computation fails.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .config import FORMATS, PRESETS, RunConfig, parse_config
from .errors import MagnoEPError, ParseError, ValidationError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_COMPUTE = 2


class _Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load(path: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Failure(EXIT_INVALID, f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_config(text)
    except (ParseError, ValidationError) as exc:
        raise _Failure(EXIT_INVALID, f"{path}: {exc}") from exc


def _with_format(cfg: RunConfig, fmt: str | None) -> RunConfig:
    return dataclasses.replace(cfg, format=fmt) if fmt else cfg


def _report(args, payload: dict):
    if not args.quiet:
        print(json.dumps(payload, indent=1, allow_nan=False))


def _preset(args, name: str, out_dir, fmt: str):
    from .presets import run_preset

    files, manifest = run_preset(name, out_dir, fmt=fmt)
    failed = [p["panel"] for p in manifest["panels"] if "error" in p]
    _report(args, {"preset": name, "files": [str(f) for f in files],
                   "closed_form_coefficient": manifest["closed_form_coefficient"], "failed_panels": failed})
    if failed:
        raise _Failure(EXIT_COMPUTE, f"panels failed: {', '.join(failed)}")


def _single(args, cfg: RunConfig):
    from .runner import run_config, write_output

    out = run_config(cfg)
    payload = {"mode": cfg.mode, **out.summary()}
    target = args.out or cfg.output
    if target is None and cfg.mode != "locate_ep":
        target = f"result.{cfg.format}"
    if target is not None:
        payload["file"] = str(write_output(out, target))
    if cfg.mode == "locate_ep":
        payload["j_over_gamma1"] = out.result.normalized_value
        payload["order"] = out.result.ep_order
    _report(args, payload)


def cmd_run(args):
    cfg = _with_format(_load(args.config), args.format)
    if cfg.mode == "preset":
        _preset(args, cfg.preset, args.out or cfg.output or ".", cfg.format)
    else:
        _single(args, cfg)


def cmd_preset(args):
    _preset(args, args.name, args.out or ".", args.format or "csv")


def cmd_locate_ep(args):
    cfg = _with_format(_load(args.config), args.format)
    if cfg.mode == "preset":
        raise _Failure(EXIT_INVALID, "locate-ep needs a model config, not a preset")
    model = "three_mode" if cfg.mode in ("spectrum3", "dynamics3") else cfg.model
    if cfg.bracket is None and not cfg.is_range:
        raise _Failure(EXIT_INVALID, "locate-ep needs a bracket or a j_over_gamma1 range")
    _single(args, dataclasses.replace(cfg, mode="locate_ep", model=model))


def cmd_validate(args):
    cfg = _load(args.config)
    _report(args, {"valid": True, "mode": cfg.mode})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, help="output format (overrides the config)")
    common.add_argument("--out", help="output file, or directory for presets")
    common.add_argument("--quiet", action="store_true", help="print nothing on success")

    parser = argparse.ArgumentParser(prog="magnoep", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("preset", parents=[common], help="write the data behind a figure")
    p.add_argument("name", choices=PRESETS)
    p.set_defaults(func=cmd_preset)
    p = sub.add_parser("locate-ep", parents=[common], help="find the exceptional point of a config's model")
    p.add_argument("config")
    p.set_defaults(func=cmd_locate_ep)
    p = sub.add_parser("validate", parents=[common], help="check a config without running it")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except _Failure as exc:
        print(f"magnoep: {exc}", file=sys.stderr)
        return exc.code
    except (MagnoEPError, ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"magnoep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
