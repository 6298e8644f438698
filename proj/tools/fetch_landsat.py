#!/usr/bin/env python3
"""Convert the Statlog (Landsat Satellite) data into the CSV layout used by forestflow.

The 6435 observations (UCI sat.trn + sat.tst) are read either from the UCI
files or from the copy bundled in the `keel-ds` wheel (satimage.dat). Output
columns are x.1 .. x.36 followed by `classes`.
"""
import argparse
import csv
import io
import pathlib
import sys
import zipfile

CLASS_NAMES = {
    "1": "red soil",
    "2": "cotton crop",
    "3": "grey soil",
    "4": "damp grey soil",
    "5": "vegetation stubble",
    "7": "very damp grey soil",
}


def rows_from_keel(wheel: pathlib.Path):
    with zipfile.ZipFile(wheel) as z:
        text = z.read("keel_ds/data/balanced/raw/satimage.dat").decode()
    for line in io.StringIO(text):
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        yield [f.strip() for f in line.split(",")]


def rows_from_uci(paths):
    for p in paths:
        for line in pathlib.Path(p).read_text().splitlines():
            if line.strip():
                yield line.split()


def main() -> int:
    ap = argparse.ArgumentParser()
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--keel-wheel", type=pathlib.Path)
    src.add_argument("--uci", nargs="+", help="sat.trn and sat.tst")
    ap.add_argument("--out", type=pathlib.Path, required=True)
    args = ap.parse_args()

    rows = list(rows_from_keel(args.keel_wheel) if args.keel_wheel else rows_from_uci(args.uci))
    if len(rows) != 6435 or any(len(r) != 37 for r in rows):
        print(f"unexpected shape: {len(rows)} rows", file=sys.stderr)
        return 1
    with args.out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([f"x.{i}" for i in range(1, 37)] + ["classes"])
        for r in rows:
            w.writerow(r[:36] + [CLASS_NAMES[r[36]]])
    return 0


if __name__ == "__main__":
    sys.exit(main())
