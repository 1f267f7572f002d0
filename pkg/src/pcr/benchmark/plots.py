"""Matplotlib figures for benchmark reports (rendered headless to PNG)."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .report import display_name  # noqa: E402
from .runner import AggregateRow, DepthRow, HybridRow, LatencySummary  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
}
# no Software/date metadata, so reruns give identical bytes
PNG_METADATA = {"Software": None}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=PNG_METADATA)
    plt.close(fig)
    return path


def plot_overall(rows: Sequence[AggregateRow], path: Path) -> Path:
    metrics = [
        ("relevance@1", "Rel@1"),
        ("relevance@10", "Rel@10"),
        ("structural_consistency", "Struct. cons."),
        ("distance_penalty", "Dist. penalty"),
    ]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.4, 3.2))
        x = np.arange(len(metrics))
        width = 0.8 / max(1, len(rows))
        for i, r in enumerate(rows):
            means = [r.metrics[k].mean for k, _ in metrics]
            stds = [r.metrics[k].std for k, _ in metrics]
            ax.bar(x + i * width - 0.4 + width / 2, means, width, yerr=stds, capsize=2, label=display_name(r.method))
        ax.set_xticks(x)
        ax.set_xticklabels([label for _, label in metrics])
        ax.set_ylabel("mean ± std over queries")
        ax.legend(ncol=len(rows), frameon=False, loc="upper center", bbox_to_anchor=(0.5, 1.15))
        return _save(fig, path)


def plot_per_domain(per_domain: Dict[str, List[AggregateRow]], path: Path) -> Path:
    domains = list(per_domain)
    methods: List[str] = []
    for rows in per_domain.values():
        for r in rows:
            if r.method not in methods:
                methods.append(r.method)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.4, 3.0))
        x = np.arange(len(domains))
        width = 0.8 / max(1, len(methods))
        for i, m in enumerate(methods):
            vals = []
            for d in domains:
                hit = [r for r in per_domain[d] if r.method == m]
                vals.append(hit[0].metrics["structural_consistency"].mean if hit else 0.0)
            ax.bar(x + i * width - 0.4 + width / 2, vals, width, label=display_name(m))
        ax.set_xticks(x)
        ax.set_xticklabels(domains)
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("structural consistency")
        ax.legend(ncol=len(methods), frameon=False, loc="upper center", bbox_to_anchor=(0.5, 1.18))
        return _save(fig, path)


def plot_depth(rows: Sequence[DepthRow], path: Path, k: int = 10) -> Path:
    labels = [r.label.replace("Depth ", "d=") for r in rows]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.8, 3.0))
        x = np.arange(len(rows))
        ax.plot(x, [r.distance_penalty for r in rows], "o-", label="distance penalty")
        ax.plot(x, [r.relevance_at_k for r in rows], "s--", label=f"relevance@{k}")
        ax.plot(x, [r.structural_consistency for r in rows], "^:", label="struct. consistency")
        ax.set_xticks(x)
        ax.set_xticklabels(labels)
        ax.set_xlabel("maximum depth")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_hybrid(rows: Sequence[HybridRow], path: Path, k: int = 10) -> Path:
    cols = [("relevance_at_k", f"Rel@{k}"), ("structural_consistency", "Struct."), ("multihop_consistency", "Multi-hop")]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.8, 3.0))
        x = np.arange(len(cols))
        width = 0.8 / max(1, len(rows))
        for i, r in enumerate(rows):
            ax.bar(x + i * width - 0.4 + width / 2, [getattr(r, c) for c, _ in cols], width, label=r.configuration)
        ax.set_xticks(x)
        ax.set_xticklabels([label for _, label in cols])
        ax.set_ylim(0, 1.1)
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_latency(s: LatencySummary, path: Path) -> Path:
    with plt.rc_context(RC):
        fig, (a1, a2) = plt.subplots(1, 2, figsize=(6.4, 2.8))
        a1.hist(s.full_samples, bins=30, color="C0")
        a1.axvline(s.mean_ms, color="k", lw=0.8)
        a1.set_xlabel("full PCR query (ms)")
        a1.set_ylabel("count")
        a2.hist(s.reach_samples, bins=30, color="C1")
        a2.axvline(s.reach_mean_ms, color="k", lw=0.8)
        a2.set_xlabel("reachability only (ms)")
        return _save(fig, path)
