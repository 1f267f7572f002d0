"""Benchmark generation, experiment runners and report rendering."""

from .dataset import BenchmarkDataset, Domain, QuerySpec, generate_dataset, load_dataset, provider_for, save_dataset
from .runner import (
    RunConfig,
    run_benchmark,
    run_depth_ablation,
    run_hybrid_ablation,
    run_latency_bench,
)
