"""Matplotlib figures written next to the delimited report files.

Each report-producing CLI command can drop a PNG summary beside its CSV or
JSON artifact; these helpers own the plotting so the CLI stays thin.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _new_axes(title: str):
    plt.rcParams.update(_STYLE)
    fig, ax = plt.subplots()
    ax.set_title(title)
    return fig, ax


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_count_figure(survey, path) -> None:
    fig, ax = _new_axes(f"tessellation counts on random {survey.k}-line sets")
    ax.hist(survey.counts, bins=min(30, max(5, len(set(survey.counts)))),
            color="#4878a8", edgecolor="white")
    bound = (4 * survey.k) ** survey.k
    ax.axvline(survey.max_count, color="#b03030", linestyle="--",
               label=f"max observed = {survey.max_count}")
    ax.set_xlabel(f"count (upper bound (4k)^k = {bound:g})")
    ax.set_ylabel("trials")
    ax.legend()
    _save(fig, path)


def save_bounds_figure(series, path) -> None:
    fig, ax = _new_axes(
        f"mass series terms, C={series.stability_constant:g}, tau={series.tau:g}"
    )
    ks = range(len(series.log_terms))
    ax.plot(ks, [t / math.log(10) for t in series.log_terms], "o-",
            color="#4878a8")
    ax.set_xlabel("k")
    ax.set_ylabel("log10 term")
    _save(fig, path)


def save_roundtrip_figure(rows, path) -> None:
    fig, ax = _new_axes("reconstruction round-trips")
    ok = sum(1 for r in rows if r["ok"])
    ax.bar(["exact", "mismatch"], [ok, len(rows) - ok],
           color=["#488858", "#b03030"])
    ax.set_ylabel("tessellations")
    orphan_counts = [r["orphan_count"] for r in rows]
    if any(orphan_counts):
        ax2 = ax.twinx()
        ax2.plot(range(len(rows)), orphan_counts, ".", color="#806020",
                 alpha=0.6)
        ax2.set_ylabel("orphans per tessellation")
        ax2.grid(False)
    _save(fig, path)


def save_estimate_figure(estimate, path) -> None:
    fig, ax = _new_axes(
        f"per-sample weights, tau={estimate.tau:g}, n={estimate.samples}"
    )
    weights = [w for _, w in (estimate.per_sample or ())]
    if weights:
        ax.hist(weights, bins=30, color="#4878a8", edgecolor="white")
    ax.axvline(estimate.z_hat, color="#b03030", linestyle="--",
               label=f"z_hat = {estimate.z_hat:.4f} +/- {estimate.std_error:.4f}")
    ax.set_xlabel("sum of exp(-H) over tessellations of the sampled lines")
    ax.set_ylabel("samples")
    ax.legend()
    _save(fig, path)
