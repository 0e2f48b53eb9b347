#!/usr/bin/env python3
"""Populate data/ with the three benchmark CSVs.

compas.csv  ProPublica compas-scores-two-years.csv, unchanged.
adult.csv   UCI adult.data with a header row, whitespace stripped, '?' blanked.
law.csv     Synthetic surrogate with the law_data.csv schema
            (race, sex, LSAT, UGPA, ZFYA), unless --law-csv points at the
            real file, which is then copied verbatim.

The Compas and Adult files are taken from the `responsibly` wheel, which
bundles both; it is fetched with `pip download` so no site access beyond the
package index is needed.
"""

import argparse
import csv
import pathlib
import shutil
import subprocess
import sys
import tempfile
import zipfile

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]

LAW_RACES = ["White", "Black", "Asian", "Hispanic", "Mexican", "Other",
             "Puertorican", "Amerindian"]
# Group sizes of the public law_data.csv release.
LAW_COUNTS = [18285, 1282, 845, 488, 389, 293, 110, 99]


def fetch_wheel(workdir):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
         "responsibly==0.1.2", "-d", str(workdir)],
        check=True)
    wheels = list(pathlib.Path(workdir).glob("responsibly-*.whl"))
    if not wheels:
        raise SystemExit("responsibly wheel not found after download")
    return zipfile.ZipFile(wheels[0])


def write_compas(wheel, out):
    data = wheel.read("responsibly/dataset/compas/compas-scores-two-years.csv")
    out.write_bytes(data)


def write_adult(wheel, out):
    text = wheel.read("responsibly/dataset/adult/adult.data").decode("utf-8")
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(ADULT_COLUMNS)
        for line in text.splitlines():
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != len(ADULT_COLUMNS):
                continue
            w.writerow(["" if c == "?" else c for c in cells])


def write_synthetic_law(out, seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    n = sum(LAW_COUNTS)
    race = np.repeat(np.arange(len(LAW_RACES)), LAW_COUNTS)
    rng.shuffle(race)
    male = (rng.random(n) < 0.56).astype(int)
    knowledge = rng.standard_normal(n)

    lsat_shift = np.array([0.0, -8.5, -2.0, -5.0, -5.0, -2.5, -6.5, -4.0])
    gpa_shift = np.array([0.0, -0.35, -0.10, -0.20, -0.20, -0.15, -0.25, -0.20])
    fya_shift = np.array([0.10, -0.75, -0.20, -0.35, -0.35, -0.20, -0.45, -0.35])

    lsat = np.clip(np.round(37.6 + 4.0 * knowledge + lsat_shift[race]
                            + 0.6 * male + rng.normal(0.0, 2.5, n)), 11, 48)
    ugpa = np.clip(np.round(3.25 + 0.25 * knowledge + gpa_shift[race]
                            - 0.05 * male + rng.normal(0.0, 0.3, n), 1), 1.5, 4.0)
    zfya = (0.32 * knowledge + fya_shift[race] + 0.05 * male
            + rng.normal(0.0, 0.82, n))

    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["race", "sex", "LSAT", "UGPA", "ZFYA"])
        for i in range(n):
            w.writerow([LAW_RACES[race[i]], 2 if male[i] else 1,
                        f"{lsat[i]:.0f}", f"{ugpa[i]:.1f}", f"{zfya[i]:.4f}"])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--law-csv", help="path to the real law_data.csv")
    ap.add_argument("--law-seed", type=int, default=20240601)
    ap.add_argument("--force", action="store_true")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    targets = {name: out / f"{name}.csv" for name in ("law", "compas", "adult")}
    if not args.force and all(p.exists() for p in targets.values()):
        return

    if args.force or not targets["compas"].exists() or not targets["adult"].exists():
        with tempfile.TemporaryDirectory() as tmp:
            wheel = fetch_wheel(tmp)
            write_compas(wheel, targets["compas"])
            write_adult(wheel, targets["adult"])

    if args.force or not targets["law"].exists():
        if args.law_csv:
            shutil.copyfile(args.law_csv, targets["law"])
        else:
            write_synthetic_law(targets["law"], args.law_seed)


if __name__ == "__main__":
    main()
