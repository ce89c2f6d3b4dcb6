#!/usr/bin/env python3
"""Run the full pipeline over the bundled presentation corpus.

For each presentation: the resolution-side computation with collapse
certificate, the bar-complex oracle comparison, and (for finite-dimensional
inputs) the BV table.  Results land as JSON under scripts/out/.

Usage:  python3 scripts/run_corpus.py [--format text]
"""

import argparse
import pathlib
import subprocess
import sys

HERE = pathlib.Path(__file__).resolve().parent
PRESENTATIONS = sorted((HERE / "presentations").glob("*.json"))
BV_INPUTS = {"ext2_deg5_char2", "ext2_deg3_char2", "trunc_x2_deg4_char2",
             "ext1_deg3_char3", "mixed_ext5_trunc4_char2"}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--format", choices=("json", "text"), default="json")
    args = parser.parse_args()
    out_dir = HERE / "out"
    out_dir.mkdir(exist_ok=True)
    failures = 0
    for path in PRESENTATIONS:
        name = path.stem
        jobs = [("compute", []), ("oracle", [])]
        if name in BV_INPUTS:
            jobs.append(("bv", []))
        for command, extra in jobs:
            argv = [sys.executable, "-m", "hhkt.cli", command,
                    "--input", str(path), "--format", args.format] + extra
            proc = subprocess.run(argv, capture_output=True, text=True)
            suffix = "txt" if args.format == "text" else "json"
            out_file = out_dir / f"{name}.{command}.{suffix}"
            out_file.write_text(proc.stdout)
            status = "ok" if proc.returncode == 0 else \
                f"exit {proc.returncode}"
            print(f"{name:28s} {command:8s} {status}  -> {out_file.name}")
            if proc.returncode != 0:
                failures += 1
                sys.stderr.write(proc.stderr)
    argv = [sys.executable, "-m", "hhkt.cli", "verify",
            "--format", args.format]
    proc = subprocess.run(argv, capture_output=True, text=True)
    suffix = "txt" if args.format == "text" else "json"
    (out_dir / f"verify.{suffix}").write_text(proc.stdout)
    print(f"{'(corpus)':28s} verify   "
          f"{'ok' if proc.returncode == 0 else 'FAILED'}")
    return 1 if failures or proc.returncode else 0


if __name__ == "__main__":
    sys.exit(main())
