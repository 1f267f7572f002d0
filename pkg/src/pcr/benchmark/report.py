"""JSON, CSV and aligned-text renderings of benchmark outputs."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

from ..stats import PairedComparison
from .runner import AggregateRow, BenchmarkReport, DepthRow, HybridRow, LatencySummary

PathLike = Union[str, Path]

OVERALL_COLUMNS = [
    ("Relevance@1", "relevance@1"),
    ("Relevance@5", "relevance@5"),
    ("Relevance@10", "relevance@10"),
    ("Struct. Consistency", "structural_consistency"),
    ("Struct. Inconsistency", "structural_inconsistency"),
    ("Multi-hop Consistency", "multihop_consistency"),
    ("Distance Penalty", "distance_penalty"),
    ("Results", "result_count"),
]


def render_table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    rows = [list(map(str, r)) for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    def fmt(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first] + rest).rstrip()
    sep = "  ".join("-" * w for w in widths)
    return "\n".join([fmt(list(header)), sep] + [fmt(r) for r in rows]) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


_DISPLAY = {"pcr-hybrid": "PCR-Hybrid", "pcr": "PCR", "vector": "Vector", "bm25": "BM25", "hybrid": "Hybrid"}


def display_name(label: str) -> str:
    """Table name for a method label; depth and fallback suffixes are kept."""
    for key, name in _DISPLAY.items():
        if label.startswith(key):
            return name + label[len(key):]
    return label


def _fmt(x: Optional[float], digits: int = 2) -> str:
    return "n/a" if x is None else f"{x:.{digits}f}"


def overall_table(rows: Sequence[AggregateRow]) -> str:
    header = ["Method"] + [h for h, _ in OVERALL_COLUMNS]
    body = [[display_name(r.method)] + [str(r.metrics[key]) for _, key in OVERALL_COLUMNS] for r in rows]
    return render_table(header, body)


def overall_csv(rows: Sequence[AggregateRow]) -> str:
    header = ["method", "n"]
    for _, key in OVERALL_COLUMNS:
        header += [f"{key}_mean", f"{key}_std"]
    body = []
    for r in rows:
        line = [r.method, r.n]
        for _, key in OVERALL_COLUMNS:
            line += [repr(r.metrics[key].mean), repr(r.metrics[key].std)]
        body.append(line)
    return render_csv(header, body)


def per_domain_table(per_domain: Dict[str, List[AggregateRow]]) -> str:
    methods: List[str] = []
    for rows in per_domain.values():
        for r in rows:
            if r.method not in methods:
                methods.append(r.method)
    header = ["Domain", "n"]
    for m in methods:
        header += [f"{display_name(m)} Rel@10", f"{display_name(m)} Struct."]
    body = []
    for name, rows in per_domain.items():
        by = {r.method: r for r in rows}
        line = [name.capitalize(), str(rows[0].n if rows else 0)]
        for m in methods:
            r = by.get(m)
            line += [_fmt(r.metrics["relevance@10"].mean), _fmt(r.metrics["structural_consistency"].mean)] if r else ["-", "-"]
        body.append(line)
    return render_table(header, body)


def comparisons_table(comps: Sequence[PairedComparison]) -> str:
    header = ["Comparison", "n", "Mean Diff.", "t-statistic", "p-value", "Cohen's d", "Significant"]
    body = [
        [
            f"{display_name(c.label_a)} vs {display_name(c.label_b)}",
            str(c.n),
            _fmt(c.mean_diff),
            _fmt(c.t_statistic),
            _fmt(c.p_value, 3),
            _fmt(c.cohens_d),
            c.significant,
        ]
        for c in comps
    ]
    return render_table(header, body)


def depth_table(rows: Sequence[DepthRow], k: int = 10) -> str:
    header = ["Max Depth", f"Relevance@{k}", "Struct. Consistency", "Distance Penalty", "Candidates"]
    body = [
        [r.label, _fmt(r.relevance_at_k), _fmt(r.structural_consistency), _fmt(r.distance_penalty), _fmt(r.mean_candidates, 1)]
        for r in rows
    ]
    return render_table(header, body)


def hybrid_table(rows: Sequence[HybridRow], k: int = 10) -> str:
    header = ["Configuration", f"Relevance@{k}", "Struct. Consistency", "Multi-hop Consistency"]
    body = [[r.configuration, _fmt(r.relevance_at_k), _fmt(r.structural_consistency), _fmt(r.multihop_consistency)] for r in rows]
    return render_table(header, body)


def latency_table(s: LatencySummary) -> str:
    header = ["Metric", "Value"]
    body = [
        ["Average Latency", f"{s.mean_ms:.2f} ms ± {s.std_ms:.2f} ms"],
        ["Min Latency", f"{s.min_ms:.2f} ms"],
        ["Max Latency", f"{s.max_ms:.2f} ms"],
        ["Reachability Computation", f"{s.reach_mean_ms:.3f} ms ± {s.reach_std_ms:.3f} ms"],
        ["Samples", str(s.samples)],
    ]
    return render_table(header, body)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def write_benchmark_report(
    report: BenchmarkReport,
    out_dir: PathLike,
    context: Optional[dict] = None,
    figures: bool = True,
) -> List[Path]:
    """Write overall / per_domain / comparisons / results as JSON, CSV, text and PNG."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = dict(context or {})
    written = [
        _write(out, "overall.json", dump_json({**ctx, "rows": [r.to_dict() for r in report.overall]})),
        _write(out, "per_domain.json", dump_json(
            {**ctx, "domains": {d: [r.to_dict() for r in rows] for d, rows in report.per_domain.items()}}
        )),
        _write(out, "comparisons.json", dump_json({**ctx, "comparisons": [c.to_dict() for c in report.comparisons]})),
        _write(out, "results.json", dump_json({
            **ctx,
            "results": [res.to_dict() for res in report.results],
            "metrics": [rep.to_dict() for rep in report.reports],
        })),
        _write(out, "overall.txt", overall_table(report.overall)),
        _write(out, "overall.csv", overall_csv(report.overall)),
        _write(out, "per_domain.txt", per_domain_table(report.per_domain)),
        _write(out, "comparisons.txt", comparisons_table(report.comparisons)),
    ]
    if figures:
        from . import plots

        written.append(plots.plot_overall(report.overall, out / "overall.png"))
        written.append(plots.plot_per_domain(report.per_domain, out / "per_domain.png"))
    return written


def write_depth_report(rows: Sequence[DepthRow], out_dir: PathLike, k: int, context: Optional[dict] = None, figures: bool = True) -> List[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        _write(out, "ablation_depth.json", dump_json({**(context or {}), "k": k, "rows": [r.to_dict() for r in rows]})),
        _write(out, "ablation_depth.txt", depth_table(rows, k)),
        _write(out, "ablation_depth.csv", render_csv(
            ["depth", "relevance_at_k", "structural_consistency", "distance_penalty", "mean_candidates"],
            [[r.label, r.relevance_at_k, r.structural_consistency, r.distance_penalty, r.mean_candidates] for r in rows],
        )),
    ]
    if figures:
        from . import plots

        written.append(plots.plot_depth(rows, out / "ablation_depth.png", k))
    return written


def write_hybrid_report(rows: Sequence[HybridRow], out_dir: PathLike, k: int, context: Optional[dict] = None, figures: bool = True) -> List[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        _write(out, "ablation_hybrid.json", dump_json({**(context or {}), "k": k, "rows": [r.to_dict() for r in rows]})),
        _write(out, "ablation_hybrid.txt", hybrid_table(rows, k)),
        _write(out, "ablation_hybrid.csv", render_csv(
            ["configuration", "relevance_at_k", "structural_consistency", "multihop_consistency"],
            [[r.configuration, r.relevance_at_k, r.structural_consistency, r.multihop_consistency] for r in rows],
        )),
    ]
    if figures:
        from . import plots

        written.append(plots.plot_hybrid(rows, out / "ablation_hybrid.png", k))
    return written


def write_latency_report(s: LatencySummary, out_dir: PathLike, context: Optional[dict] = None, figures: bool = True) -> List[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        _write(out, "latency.json", dump_json({**(context or {}), **s.to_dict()})),
        _write(out, "latency.txt", latency_table(s)),
    ]
    if figures:
        from . import plots

        written.append(plots.plot_latency(s, out / "latency.png"))
    return written
