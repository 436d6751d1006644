#!/usr/bin/env python3
"""Regenerates the bundled sample datasets in datasets/.

iris.csv is Fisher's Iris data as shipped with scikit-learn. The two synthetic
sets are drawn from a fixed numpy seed so reruns reproduce them byte for byte.
"""

import argparse
import csv
import pathlib

import numpy as np
from sklearn.datasets import load_iris

SEED = 20240607


def write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def iris(out):
    data = load_iris()
    names = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
    rows = [[f"{v:.1f}" for v in x] + [data.target_names[t]] for x, t in zip(data.data, data.target)]
    write(out / "iris.csv", names + ["species"], rows)


def two_moons(out, rng, n=200, noise=0.25):
    half = n // 2
    t_outer = np.linspace(0, np.pi, half)
    t_inner = np.linspace(0, np.pi, n - half)
    outer = np.column_stack([np.cos(t_outer), np.sin(t_outer)])
    inner = np.column_stack([1 - np.cos(t_inner), 1 - np.sin(t_inner) - 0.5])
    pts = np.vstack([outer, inner]) + rng.normal(scale=noise, size=(n, 2))
    labels = ["upper"] * half + ["lower"] * (n - half)
    order = rng.permutation(n)
    rows = [[f"{pts[i, 0]:.6f}", f"{pts[i, 1]:.6f}", labels[i]] for i in order]
    write(out / "two_moons.csv", ["x1", "x2", "moon"], rows)


def two_gaussians(out, rng, per_class=100, offset=1.5):
    a = rng.normal(size=(per_class, 2)) + [-offset, 0.0]
    b = rng.normal(size=(per_class, 2)) + [offset, 0.0]
    rows = []
    for i in range(per_class):
        rows.append([f"{a[i, 0]:.6f}", f"{a[i, 1]:.6f}", "left"])
        rows.append([f"{b[i, 0]:.6f}", f"{b[i, 1]:.6f}", "right"])
    write(out / "two_gaussians.csv", ["u", "v", "side"], rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "datasets"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    iris(out)
    two_moons(out, rng)
    two_gaussians(out, rng)


if __name__ == "__main__":
    main()
