#!/usr/bin/env python3
"""Fetch the three UCI benchmark datasets and convert them to the CSV layout
load_csv expects (header row, feature columns, one label column).

  australian.csv  Statlog Australian credit approval   690 x 14, label 0/1
  wpbc.csv        Breast Cancer Wisconsin (Prognostic) 198 x 33, label N/R
  sonar.csv       Connectionist Bench (Sonar)          208 x 60, label M/R

Notes on WPBC: the raw file has 35 fields per row — record ID, outcome,
time, 30 nucleus statistics, tumor size, lymph node status. The ID is
dropped and the outcome becomes the label, leaving 33 usable features (the
published attribute count of 34 includes the ID). Four rows carry '?' for
lymph node status; they are kept, with the missing value replaced by the
mean of the observed column, so the sample count stays at 198.

Usage: python3 tools/fetch_uci.py [--out data/]
"""

import argparse
import csv
import io
import sys
import urllib.request

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "australian": f"{BASE}/statlog/australian/australian.dat",
    "wpbc": f"{BASE}/breast-cancer-wisconsin/wpbc.data",
    "sonar": f"{BASE}/undocumented/connectionist-bench/sonar/sonar.all-data",
}


def fetch(url):
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read().decode("utf-8")


def rows_of(text, delimiter):
    reader = csv.reader(io.StringIO(text), delimiter=delimiter, skipinitialspace=True)
    rows = []
    for row in reader:
        cells = [cell.strip() for cell in row if cell.strip()]
        if cells:
            rows.append(cells)
    return rows


def write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}: {len(rows)} rows x {len(header) - 1} features")


def convert_australian(text, out_path):
    # Space-separated, 14 anonymized attributes then the class (0/1).
    rows = rows_of(text, " ")
    for row in rows:
        if len(row) != 15:
            sys.exit(f"australian.dat: expected 15 fields, got {len(row)}")
    header = [f"a{i}" for i in range(1, 15)] + ["label"]
    write_csv(out_path, header, rows)


def convert_wpbc(text, out_path):
    # Comma-separated: ID, outcome (N/R), time, 30 nucleus features,
    # tumor size, lymph node status (may be '?').
    rows = rows_of(text, ",")
    for row in rows:
        if len(row) != 35:
            sys.exit(f"wpbc.data: expected 35 fields, got {len(row)}")
    observed = [float(row[34]) for row in rows if row[34] != "?"]
    lymph_mean = sum(observed) / len(observed)
    converted = []
    for row in rows:
        features = row[2:34] + [row[34] if row[34] != "?" else repr(lymph_mean)]
        converted.append(features + [row[1]])
    stats = ["radius", "texture", "perimeter", "area", "smoothness", "compactness",
             "concavity", "concave_points", "symmetry", "fractal_dimension"]
    names = ["time"]
    for group in ("mean", "se", "worst"):
        names += [f"{stat}_{group}" for stat in stats]
    names += ["tumor_size", "lymph_nodes"]
    write_csv(out_path, names + ["label"], converted)


def convert_sonar(text, out_path):
    # Comma-separated: 60 energy bands then the class (R = rock, M = mine).
    rows = rows_of(text, ",")
    for row in rows:
        if len(row) != 61:
            sys.exit(f"sonar.all-data: expected 61 fields, got {len(row)}")
    header = [f"band{i}" for i in range(60)] + ["label"]
    write_csv(out_path, header, rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data", help="output directory (default: data/)")
    args = parser.parse_args()

    import os

    os.makedirs(args.out, exist_ok=True)
    convert_australian(fetch(SOURCES["australian"]), os.path.join(args.out, "australian.csv"))
    convert_wpbc(fetch(SOURCES["wpbc"]), os.path.join(args.out, "wpbc.csv"))
    convert_sonar(fetch(SOURCES["sonar"]), os.path.join(args.out, "sonar.csv"))


if __name__ == "__main__":
    main()
