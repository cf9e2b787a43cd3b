#!/usr/bin/env python3
"""Regenerate the bundled CSV snapshots in src/qcensemble/data/.

The three iris pair datasets are cut from the classic Fisher iris data
as distributed with scikit-learn (identical to the UCI copy). The toy
dataset is the four orthogonal one-hot vectors used in the circuit
walkthrough tests. Run from the repository root:

    python3 scripts/make_datasets.py
"""

import csv
from pathlib import Path

from sklearn.datasets import load_iris

OUT = Path(__file__).resolve().parent.parent / "src" / "qcensemble" / "data"

IRIS_COLUMNS = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
PAIRS = {
    "iris_setosa_versicolor": (0, 1),
    "iris_setosa_virginica": (0, 2),
    "iris_versicolor_virginica": (1, 2),
}


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    iris = load_iris()
    for name, (a, b) in PAIRS.items():
        rows = []
        for x, y in zip(iris.data, iris.target):
            if y in (a, b):
                rows.append([f"{v:g}" for v in x] + [iris.target_names[y]])
        write_csv(OUT / f"{name}.csv", IRIS_COLUMNS + ["label"], rows)

    toy_rows = [
        ["1", "0", "0", "0", "neg"],
        ["0", "1", "0", "0", "neg"],
        ["0", "0", "1", "0", "pos"],
        ["0", "0", "0", "1", "pos"],
    ]
    write_csv(OUT / "toy_orthogonal.csv", ["f0", "f1", "f2", "f3", "label"], toy_rows)


if __name__ == "__main__":
    main()
