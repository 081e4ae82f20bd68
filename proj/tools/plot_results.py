#!/usr/bin/env python3
"""Plots for the CSV outputs of `dlphedge experiment`."""

import argparse
import csv
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_csv(path):
    with open(path, newline="") as f:
        return [row for row in csv.DictReader(line for line in f if not line.startswith("#"))]


def col(rows, key):
    return [float(r[key]) for r in rows]


def plot_fig1(d):
    rows = read_csv(os.path.join(d, "fig1_curve.csv"))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(col(rows, "T"), col(rows, "european_price"), marker="o", label="held to horizon")
    ax.plot(col(rows, "T"), col(rows, "premium"), linestyle="--", label="premium P0(1-theta0)")
    ax.set_xlabel("horizon T (years)")
    ax.set_ylabel("price (P0 units)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(d, "fig1_curve.png"), dpi=120)


def plot_heatmaps(d):
    rows = [r for r in read_csv(os.path.join(d, "results.csv")) if r["status"] == "ok"]
    strategies = sorted({r["strategy"] for r in rows})
    mus = sorted({float(r["mu"]) for r in rows})
    sigmas = sorted({float(r["sigma"]) for r in rows})
    theta0s = sorted({float(r["theta0"]) for r in rows})
    for s in strategies:
        fig, axes = plt.subplots(1, len(theta0s), figsize=(3.2 * len(theta0s), 3.2), squeeze=False)
        for j, th in enumerate(theta0s):
            grid = [[float("nan")] * len(sigmas) for _ in mus]
            for r in rows:
                if r["strategy"] == s and float(r["theta0"]) == th:
                    grid[mus.index(float(r["mu"]))][sigmas.index(float(r["sigma"]))] = abs(
                        float(r["mre_mean"])
                    )
            ax = axes[0][j]
            im = ax.imshow(grid, origin="lower", cmap="viridis")
            ax.set_xticks(range(len(sigmas)), [f"{x:g}" for x in sigmas])
            ax.set_yticks(range(len(mus)), [f"{x:g}" for x in mus])
            ax.set_xlabel("sigma")
            ax.set_ylabel("mu")
            ax.set_title(f"theta0={th:g}")
            fig.colorbar(im, ax=ax, shrink=0.8)
        fig.suptitle(f"|mean relative error|, {s}")
        fig.tight_layout()
        fig.savefig(os.path.join(d, f"heatmap_{s}.png"), dpi=120)


def plot_prices(d):
    rows = [r for r in read_csv(os.path.join(d, "results.csv")) if r["status"] == "ok"]
    deep = [r for r in rows if r["strategy"] == "deep"]
    if not deep:
        return
    labels = [f"s={float(r['spread']):g}\nfee={float(r['fee']):g}" for r in deep]
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(deep)), 4))
    ax.bar(range(len(deep)), col(deep, "v0"), label="deep hedge price")
    ax.plot(range(len(deep)), col(deep, "premium"), "r--", label="premium")
    ax.set_xticks(range(len(deep)), labels, fontsize=7)
    ax.set_ylabel("price")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(d, "prices.png"), dpi=120)


def plot_trace(d):
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, style in (("deep", "-"), ("delta", ":")):
        path = os.path.join(d, f"trace_{name}.csv")
        if not os.path.exists(path):
            continue
        rows = read_csv(path)
        by_path = {}
        for r in rows:
            by_path.setdefault(r["path"], []).append(r)
        for i, (pid, pts) in enumerate(sorted(by_path.items())):
            t = col(pts, "t")
            hedge = [float(p["V"]) - float(p["C"]) for p in pts]
            ax.plot(t, hedge, style, color=f"C{i}", label=f"{name} V-C" if i == 0 else None)
            if name == "deep":
                ax.plot(t, col(pts, "psi"), "--", color=f"C{i}", alpha=0.5,
                        label="target" if i == 0 else None)
    ax.set_xlabel("t (years)")
    ax.set_ylabel("value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(d, "trace.png"), dpi=120)


def plot_train_curve(d):
    logs = [os.path.join(d, "train_log.csv")] if os.path.exists(os.path.join(d, "train_log.csv")) \
        else sorted(glob.glob(os.path.join(d, "train_logs", "*.csv")))
    if not logs:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in logs:
        rows = read_csv(path)
        ax.plot(col(rows, "epoch"), col(rows, "loss"), label=os.path.basename(path))
    ax.set_yscale("log")
    ax.set_xlabel("epoch")
    ax.set_ylabel("training loss")
    if len(logs) <= 8:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(os.path.join(d, "train_curve.png"), dpi=120)


def plot_price_vs_spread(d):
    rows = [r for r in read_csv(os.path.join(d, "price_vs_spread.csv")) if r["status"] == "ok"]
    fig, ax = plt.subplots(figsize=(6, 4))
    for fee in sorted({float(r["fee"]) for r in rows}):
        sub = sorted((r for r in rows if float(r["fee"]) == fee), key=lambda r: float(r["spread"]))
        ax.plot(col(sub, "spread"), col(sub, "v0"), marker="o", label=f"fee={fee:g}")
    if rows:
        ax.axhline(float(rows[0]["premium"]), color="k", linestyle="--", label="premium")
    ax.set_xlabel("rate spread")
    ax.set_ylabel("deep hedge price")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(d, "price_vs_spread.png"), dpi=120)


PLOTS = {
    "fig1_curve": [plot_fig1],
    "exp1_grid": [plot_heatmaps, plot_prices, plot_train_curve],
    "exp2_spread_cost": [plot_prices, plot_price_vs_spread, plot_train_curve],
    "hedge_trace": [plot_trace, plot_prices],
    "train_curve": [plot_train_curve],
    "price_vs_spread": [plot_price_vs_spread],
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--experiment", required=True, choices=sorted(PLOTS))
    p.add_argument("--dir", required=True)
    args = p.parse_args()
    for fn in PLOTS[args.experiment]:
        fn(args.dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
