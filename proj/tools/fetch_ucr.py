#!/usr/bin/env python3
"""Fetch a subset of UCR archive datasets from PyPI-hosted wheels.

The sandboxed build only reaches package registries, so the datasets are
pulled from wheels that bundle them and rewritten as UCR tab-separated files:

    data/ucr/<Name>/<Name>_TRAIN.tsv
    data/ucr/<Name>/<Name>_TEST.tsv

Usage: tools/fetch_ucr.py [--out data/ucr] [Name ...]
"""
import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

SOURCES = {
    # wheel spec -> (member template, format)
    "ucr_datasets==0.0.6": ("ucr_datasets/data/{name}_{split}.tsv", "tsv"),
    "pyts==0.13.0": ("pyts/datasets/cached_datasets/UCR/{name}/{name}_{split}.txt", "ws"),
    "sktime==1.2.0": ("sktime/datasets/data/{name}/{name}_{split}.ts", "ts"),
}

DEFAULT = [
    "Coffee", "GunPoint", "ECG200", "ItalyPowerDemand", "Chinatown",
    "BeetleFly", "BirdChicken", "ArrowHead", "Beef", "FaceFour", "BME",
    "ECGFiveDays", "CBF", "DiatomSizeReduction", "DodgerLoopDay",
    "GesturePebbleZ1", "Wafer",
]


def convert(raw: str, fmt: str) -> str:
    rows = []
    if fmt == "tsv":
        return raw if raw.endswith("\n") else raw + "\n"
    if fmt == "ws":
        for line in raw.splitlines():
            parts = line.split()
            if not parts:
                continue
            label = parts[0]
            try:
                if float(label).is_integer():
                    label = str(int(float(label)))
            except ValueError:
                pass
            rows.append("\t".join([label] + parts[1:]))
    elif fmt == "ts":
        in_data = False
        for line in raw.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.lower() == "@data":
                in_data = True
                continue
            if not in_data:
                continue
            values, label = line.rsplit(":", 1)
            rows.append("\t".join([label] + values.split(",")))
    return "\n".join(rows) + "\n"


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/ucr")
    ap.add_argument("names", nargs="*", default=DEFAULT)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    wanted = set(args.names)

    with tempfile.TemporaryDirectory() as tmp:
        for spec, (template, fmt) in SOURCES.items():
            if not wanted:
                break
            subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                            spec, "-d", tmp], check=True)
            wheel = next(p for p in pathlib.Path(tmp).glob("*.whl")
                         if p.name.lower().startswith(spec.split("==")[0].lower()))
            with zipfile.ZipFile(wheel) as z:
                members = set(z.namelist())
                for name in sorted(wanted):
                    paths = {s: template.format(name=name, split=s) for s in ("TRAIN", "TEST")}
                    if not all(p in members for p in paths.values()):
                        continue
                    target = out / name
                    target.mkdir(parents=True, exist_ok=True)
                    for split, member in paths.items():
                        text = convert(z.read(member).decode(), fmt)
                        (target / f"{name}_{split}.tsv").write_text(text)
                    print(f"{name}: {spec}")
                    wanted.discard(name)
    for name in sorted(wanted):
        print(f"{name}: not found in any source", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
