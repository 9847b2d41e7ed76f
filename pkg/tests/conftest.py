"""Pytest configuration and shared fixtures.

This module provides reusable fixtures for embeddings, probe indices,
the worked hub-demotion example and small synthetic benchmarks.
"""

import shutil
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np
import pytest

from src.models.config import NormaliserConfig, SynthSpec
from src.models.embeddings import EmbeddingMatrix
from src.models.probe import ProbeIndex
from src.normalise.probe import activation_set, inverted_softmax_denominators
from src.similarity.kernel import top_k_mean
from src.storage.binary_handler import BinaryHandler
from src.storage.csv_handler import CSVHandler


# Test configuration
SEED = 42
SMALL_SYNTH = SynthSpec(n_queries=60, n_gallery=40, n_querybank=50, dim=16, seed=3)


@pytest.fixture(scope="session")
def test_seed():
    """Provide consistent random seed for all tests."""
    return SEED


@pytest.fixture
def rng(test_seed):
    """Fresh seeded generator per test."""
    return np.random.default_rng(test_seed)


@pytest.fixture(scope="session")
def temp_dir():
    """Create temporary directory for test data."""
    temp_path = Path(tempfile.mkdtemp(prefix="qbnorm_test_"))
    yield temp_path

    # Cleanup after all tests
    if temp_path.exists():
        shutil.rmtree(temp_path)


def make_matrix(rows, prefix: str = "x", ids: Optional[list[str]] = None) -> EmbeddingMatrix:
    """EmbeddingMatrix from nested lists with ids ``prefix0``, ``prefix1``, ..."""
    data = np.asarray(rows, dtype=np.float64)
    if ids is None:
        ids = [f"{prefix}{i}" for i in range(data.shape[0])]
    return EmbeddingMatrix(ids=tuple(ids), data=data)


def probe_from_matrix(
    probe: np.ndarray,
    beta: float = 1.0,
    k_activation: int = 1,
    K_csls: int = 1,
    active: Optional[list[int]] = None,
) -> ProbeIndex:
    """ProbeIndex built directly from a probe matrix (gallery rows, querybank columns).

    ``active`` overrides the activation set computed from the matrix.
    """
    probe = np.asarray(probe, dtype=np.float64)
    n_gallery, n_bank = probe.shape
    denominators, log_denominators = inverted_softmax_denominators(probe, beta)
    if active is None:
        active_set = activation_set(probe, min(k_activation, n_gallery))
    else:
        active_set = np.asarray(sorted(active), dtype=np.int64)
    csls = top_k_mean(probe, K_csls) if K_csls <= min(n_gallery, n_bank) else None
    return ProbeIndex(
        gallery_size=n_gallery,
        querybank_size=n_bank,
        beta=beta,
        k_activation=k_activation,
        K_csls=K_csls,
        is_denominators=denominators,
        is_log_denominators=log_denominators,
        csls_topk_mean=csls,
        activation_set=active_set,
        probe=probe,
        sorted_rows=np.sort(probe, axis=1),
    )


@pytest.fixture
def worked_probe():
    """Probe rows [[1.0], [0.0]] with beta=1: D = [e, 1], activation set {0}."""
    return probe_from_matrix([[1.0], [0.0]], beta=1.0)


@pytest.fixture
def hub_fixture():
    """One query, a two-item gallery and a one-item querybank.

    The query prefers g1 (cos 0.78 vs 0.62) but the querybank item sits
    exactly on g1, so g1 is a hub; every normaliser should demote it.
    """
    queries = make_matrix([[1.0, 0.8, 0.0]], ids=["q1"])
    gallery = make_matrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], ids=["g1", "g2"])
    querybank = make_matrix([[1.0, 0.0, 0.0]], ids=["b1"])
    return queries, gallery, querybank


@pytest.fixture
def hub_files(tmp_path, hub_fixture):
    """``hub_fixture`` written as QBN1 files plus a ground-truth CSV (q1 -> g2)."""
    queries, gallery, querybank = hub_fixture
    handler = BinaryHandler()
    paths = {
        "queries": handler.write(queries, tmp_path / "queries.qbn"),
        "gallery": handler.write(gallery, tmp_path / "gallery.qbn"),
        "querybank": handler.write(querybank, tmp_path / "querybank.qbn"),
    }
    paths["gt"] = CSVHandler().write_ground_truth([("q1", "g2")], tmp_path / "gt.csv")
    return paths


@pytest.fixture(scope="session")
def small_synth_spec():
    """Synthetic benchmark small enough for unit tests."""
    return SMALL_SYNTH


@pytest.fixture
def dis_config():
    return NormaliserConfig(method="dis", beta=20.0, k_activation=1)
