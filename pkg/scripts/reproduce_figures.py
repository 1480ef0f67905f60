"""Write the data behind every figure preset into one directory.

    python3 scripts/reproduce_figures.py [--out figures] [--format csv|json]

Each preset gets its own subdirectory with per-panel configs, data files and
a manifest. The exit status is nonzero if any panel failed.
"""
import argparse
import sys
import time
from pathlib import Path

from magnoep.config import FORMATS, PRESETS
from magnoep.presets import run_preset


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--out", default="figures", help="output root directory")
    parser.add_argument("--format", choices=FORMATS, default="csv")
    parser.add_argument("--workers", type=int, default=None, help="sweep worker processes")
    args = parser.parse_args(argv)

    failures = 0
    for name in PRESETS:
        t0 = time.perf_counter()
        files, manifest = run_preset(name, Path(args.out) / name, fmt=args.format, workers=args.workers)
        bad = [p["panel"] for p in manifest["panels"] if "error" in p]
        failures += len(bad)
        status = "ok" if not bad else "failed: " + ", ".join(bad)
        print(f"{name}: {len(files)} files in {time.perf_counter() - t0:.2f} s ({status})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
