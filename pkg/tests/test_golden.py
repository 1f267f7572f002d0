"""Frozen outputs for the reference seed; regenerate deliberately if the generator changes."""

import hashlib
import json
from pathlib import Path

import pytest

from pcr.benchmark import RunConfig, run_benchmark, save_dataset

GOLDEN = json.loads((Path(__file__).parent / "golden" / "reference_seed42.json").read_text())


def test_dataset_files_match_frozen_digests(reference_dataset, tmp_path):
    root = save_dataset(reference_dataset, tmp_path / "ds")
    got = {p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(root.rglob("*")) if p.is_file()}
    assert got == GOLDEN["dataset_sha256"]


def test_metrics_match_frozen_values(reference_dataset, reference_provider):
    rep = run_benchmark(reference_dataset, RunConfig(), reference_provider)
    for row in rep.overall:
        for name, ms in row.metrics.items():
            frozen = GOLDEN["overall"][row.method][name]
            assert ms.mean == pytest.approx(frozen["mean"], abs=1e-12), (row.method, name)
            assert ms.std == pytest.approx(frozen["std"], abs=1e-12), (row.method, name)
    for c in rep.comparisons:
        frozen = GOLDEN["comparisons"][f"{c.label_a} vs {c.label_b}"]
        assert c.t_statistic == pytest.approx(frozen["t"], abs=1e-9)
        assert c.p_value == pytest.approx(frozen["p"], abs=1e-9)
        assert c.cohens_d == pytest.approx(frozen["d"], abs=1e-9)
