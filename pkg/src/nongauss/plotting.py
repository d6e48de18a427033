"""Render figure datasets to PNG files alongside the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _columns(table):
    cols = {name: [] for name in table.columns}
    for row in table.rows:
        for name, value in zip(table.columns, row):
            cols[name].append(value)
    return {k: np.asarray(v) for k, v in cols.items()}


def render_figure(fig_id, tables, path):
    """Draw the dataset(s) of one figure id and save a PNG."""
    fig_id = fig_id.lower()
    if fig_id == "f2":
        fig = _render_random_study(tables)
    elif fig_id == "f1-top":
        fig = _render_lines(tables[0], x="p", logx=True,
                            ylabel="non-Gaussianity",
                            title="number states and their best copy count")
    elif fig_id == "f1-bottom":
        fig = _render_lines(tables[0], x="phi", ylabel="non-Gaussianity",
                            title="two-mode and coherent superpositions")
    elif fig_id == "f3-left":
        fig = _render_lines(tables[0], x="one_minus_eta", ylabel="non-Gaussianity",
                            title="number states under loss")
    elif fig_id == "f3-right":
        fig = _render_lines(tables[0], x="transmissivity", ylabel="non-Gaussianity",
                            title="photon-subtracted squeezed vacuum")
    elif fig_id == "f4":
        fig = _render_unconstrained(tables[0])
    else:
        fig = _render_lines(tables[0], x=tables[0].columns[0],
                            ylabel=tables[0].columns[-1], title=fig_id)
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)


def _render_lines(table, x, ylabel, title, logx=False):
    cols = _columns(table)
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for name in table.columns:
        if name == x or cols[name].dtype.kind not in "fi":
            continue
        ax.plot(cols[x], cols[name], label=name, lw=1.4)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(x)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def _render_random_study(tables):
    hist = next(t for t in tables if t.name == "f2")
    summary = next(t for t in tables if t.name == "f2-summary")
    hcols = _columns(hist)
    scols = _columns(summary)
    ds = sorted(set(int(d) for d in hcols["d"]))
    fig, axes = plt.subplots(2, 2, figsize=(7.5, 5.5))
    for ax, d in zip(axes.ravel(), ds):
        mask = hcols["d"] == d
        centers = 0.5 * (hcols["bin_lo"][mask] + hcols["bin_hi"][mask])
        width = (hcols["bin_hi"][mask] - hcols["bin_lo"][mask]).mean()
        ax.bar(centers, hcols["count"][mask], width=width, color="0.4")
        ax.set_title(f"d = {d}", fontsize=9)
        ax.set_xlabel("non-Gaussianity")
    ax = axes.ravel()[-1]
    ax.errorbar(scols["d"], scols["mean"], yerr=np.sqrt(scols["variance"]),
                fmt="o-", capsize=3)
    ax.set_xlabel("d")
    ax.set_title("mean and spread vs dimension", fontsize=9)
    fig.tight_layout()
    return fig


def _render_unconstrained(table):
    cols = _columns(table)
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.4), sharex=True)
    for ax, tag in zip(axes, ("0.5", "5")):
        ax.plot(cols["phi"], cols[f"delta_alpha_{tag}"], label="fixed mean", lw=1.4)
        ax.plot(cols["phi"], cols[f"delta_prime_alpha_{tag}"], "--",
                label="optimized mean", lw=1.4)
        ax.set_title(f"alpha = {tag}", fontsize=10)
        ax.set_xlabel("phi")
        ax.legend(fontsize=8)
    axes[0].set_ylabel("non-Gaussianity")
    fig.tight_layout()
    return fig
