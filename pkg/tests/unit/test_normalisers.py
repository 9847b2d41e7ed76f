"""Unit tests for the querybank normalisers.

Worked examples for each method, randomised comparisons against direct
formula implementations that use no precomputation, and the DIS branch
properties.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from src.models.config import NormaliserConfig
from src.models.errors import ArgumentError, ShapeError
from src.normalise.normalisers import (
    get_normaliser,
    identity,
    normalise_csls,
    normalise_dis,
    normalise_gc,
    normalise_is,
    querybank_rank,
)
from src.normalise.probe import build_probe
from src.similarity.kernel import argsort_desc, sim_vector
from tests.conftest import make_matrix, probe_from_matrix

ORACLE_SEEDS = 200


def oracle_gc(s, probe):
    rank = np.array([np.sum(probe[j] > s[j]) for j in range(len(s))])
    return -(rank - s)


def oracle_csls(s, probe, k):
    query_mean = np.mean(sorted(s, reverse=True)[:k])
    gallery_means = np.array([np.mean(sorted(row, reverse=True)[:k]) for row in probe])
    return 2 * s - query_mean - gallery_means


def oracle_is(s, probe, beta):
    return np.array(
        [math.exp(beta * s[j]) / sum(math.exp(beta * p) for p in probe[j]) for j in range(len(s))]
    )


def oracle_activation(probe, k):
    active = set()
    for i in range(probe.shape[1]):
        column = probe[:, i]
        order = sorted(range(len(column)), key=lambda j: (-column[j], j))
        active.update(order[:k])
    return active


def oracle_dis(s, probe, beta, k):
    top1 = min(range(len(s)), key=lambda j: (-s[j], j))
    if top1 in oracle_activation(probe, k):
        return oracle_is(s, probe, beta)
    return np.array(s, dtype=np.float64)


def random_instance(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 9))
    n_gallery = int(rng.integers(1, 21))
    n_bank = int(rng.integers(1, 21))

    def rows(n):
        data = rng.standard_normal((n, d))
        data[np.linalg.norm(data, axis=1) == 0] = 1.0
        return data

    query = rows(1)[0]
    gallery = make_matrix(rows(n_gallery), prefix="g")
    bank = make_matrix(rows(n_bank), prefix="b")
    beta = float(rng.uniform(0.5, 30.0))
    k_act = int(rng.integers(1, n_gallery + 1))
    k_csls = int(rng.integers(1, min(n_gallery, n_bank) + 1))
    return query, gallery, bank, beta, k_act, k_csls


@pytest.mark.unit
class TestWorkedExamples:
    """Hand-computed values for every normaliser."""

    def test_gc_rank_one(self):
        p = probe_from_matrix([[0.9, 0.5, 0.6]])
        assert normalise_gc(np.array([0.7]), p)[0] == pytest.approx(-0.3)

    def test_gc_tops_the_querybank(self):
        p = probe_from_matrix([[0.9, 0.5, 0.6]])
        assert normalise_gc(np.array([0.95]), p)[0] == pytest.approx(0.95)

    def test_gc_tie_is_not_greater(self):
        p = probe_from_matrix([[0.5]])
        assert normalise_gc(np.array([0.5]), p)[0] == pytest.approx(0.5)

    def test_csls_hand_arithmetic(self):
        p = probe_from_matrix([[0.9], [0.2]], K_csls=1)
        eta = normalise_csls(np.array([0.8, 0.4]), p)
        np.testing.assert_allclose(eta, [-0.1, -0.2], atol=1e-12)

    def test_csls_self_cancel(self):
        p = probe_from_matrix([[0.5]], K_csls=1)
        np.testing.assert_allclose(normalise_csls(np.array([0.5]), p), [0.0], atol=1e-12)

    def test_is_flips_ranking(self, worked_probe):
        s = np.array([1.0, 0.5])
        eta = normalise_is(s, worked_probe)
        np.testing.assert_allclose(eta, [1.0, 1.64872], atol=1e-5)
        assert argsort_desc(eta).order.tolist() == [1, 0]
        assert argsort_desc(s).order.tolist() == [0, 1]

    def test_is_small_beta_tends_to_uniform(self):
        n_bank = 4
        p = probe_from_matrix(np.full((3, n_bank), 0.3), beta=1e-9)
        eta = normalise_is(np.array([0.9, -0.2, 0.1]), p)
        np.testing.assert_allclose(eta, 1.0 / n_bank, atol=1e-6)

    def test_dis_takes_is_branch(self, worked_probe):
        eta = normalise_dis(np.array([1.0, 0.5]), worked_probe)
        np.testing.assert_allclose(eta, [1.0, 1.64872], atol=1e-5)

    def test_dis_empty_activation_is_identity(self, rng):
        p = probe_from_matrix(rng.uniform(-1, 1, (8, 3)), active=[])
        for _ in range(1000):
            s = rng.uniform(-1, 1, 8)
            assert normalise_dis(s, p).tobytes() == s.tobytes()

    def test_dis_full_activation_equals_is(self, rng):
        p = probe_from_matrix(rng.uniform(-1, 1, (6, 4)), beta=5.0, active=list(range(6)))
        for _ in range(20):
            s = rng.uniform(-1, 1, 6)
            assert normalise_dis(s, p).tobytes() == normalise_is(s, p).tobytes()

    def test_length_mismatch(self, worked_probe):
        for normalise in (normalise_gc, normalise_csls, normalise_is, normalise_dis):
            with pytest.raises(ShapeError):
                normalise(np.array([0.1, 0.2, 0.3]), worked_probe)

    def test_csls_k_too_large(self):
        p = probe_from_matrix([[0.9], [0.2]], K_csls=2)
        with pytest.raises(ArgumentError):
            normalise_csls(np.array([0.8, 0.4]), p)

    def test_unknown_method(self):
        with pytest.raises(ArgumentError):
            get_normaliser("cent")

    def test_identity_copies(self):
        s = np.array([0.3, 0.1])
        out = identity(s)
        assert out is not s
        assert out.tolist() == s.tolist()


@pytest.mark.unit
class TestOracleEquivalence:
    """Precomputed normalisers against direct per-item formulas."""

    @pytest.mark.parametrize("method", ["gc", "csls", "is", "dis"])
    def test_random_instances(self, method):
        for seed in range(ORACLE_SEEDS):
            query, gallery, bank, beta, k_act, k_csls = random_instance(seed)
            cfg = NormaliserConfig(method=method, beta=beta, k_activation=k_act, K_csls=k_csls)
            p = build_probe(bank, gallery, cfg, keep_probe=True)
            probe = p.probe
            s = sim_vector(query, gallery)

            if method == "gc":
                expected = oracle_gc(s, probe)
            elif method == "csls":
                expected = oracle_csls(s, probe, k_csls)
            elif method == "is":
                expected = oracle_is(s, probe, beta)
            else:
                expected = oracle_dis(s, probe, beta, k_act)

            eta = get_normaliser(method)(s, p)
            scale = np.maximum(1.0, np.abs(expected))
            assert np.all(np.abs(eta - expected) <= 1e-6 * scale), f"seed {seed}"
            # The produced order must be a descending order of the oracle scores
            ranked = expected[argsort_desc(eta).order]
            assert np.all(np.diff(ranked) <= 1e-9 * scale.max()), f"seed {seed}"

    def test_activation_set_matches_brute_force(self):
        for seed in range(ORACLE_SEEDS):
            _, gallery, bank, beta, k_act, _ = random_instance(seed)
            p = build_probe(bank, gallery, NormaliserConfig(beta=beta, k_activation=k_act),
                            keep_probe=True)
            assert set(p.activation_set.tolist()) == oracle_activation(p.probe, k_act)
            assert p.activation_set.size <= bank.n * k_act

    def test_block_matches_rows(self, rng):
        """The block form matches per-row calls."""
        p = probe_from_matrix(rng.uniform(-1, 1, (9, 5)), beta=7.0, K_csls=3, active=[0, 4])
        block = rng.uniform(-1, 1, (6, 9))
        for normalise in (normalise_gc, normalise_csls, normalise_is, normalise_dis):
            out = normalise(block, p)
            for row, s in zip(out, block):
                np.testing.assert_allclose(row, normalise(s, p), rtol=1e-12, atol=1e-15)


@pytest.mark.unit
class TestQuerybankRank:
    """Binary-search rank against a linear scan."""

    def test_random_cases_with_ties(self, rng):
        for _ in range(1000):
            n_bank = int(rng.integers(1, 30))
            # Coarse grid values make ties between s and the row common
            row = rng.integers(-5, 6, n_bank) / 5.0
            value = rng.integers(-6, 7) / 5.0
            sorted_rows = np.sort(row)[None, :]
            fast = querybank_rank(np.array([value]), sorted_rows)[0]
            assert fast == int(np.sum(row > value))

    def test_vectorised_over_gallery(self):
        sorted_rows = np.sort(np.array([[0.9, 0.5, 0.6], [0.1, 0.1, 0.1]]), axis=1)
        ranks = querybank_rank(np.array([0.7, 0.1]), sorted_rows)
        assert ranks.tolist() == [1, 0]

    def test_gc_without_probe_matrix(self, worked_probe):
        p = replace(worked_probe, probe=None, sorted_rows=None)
        with pytest.raises(ArgumentError):
            normalise_gc(np.array([0.5, 0.5]), p)


@pytest.mark.unit
class TestConstantProbeNeutrality:
    """Identical probe rows leave the ranking unchanged."""

    @pytest.mark.parametrize("method", ["gc", "csls", "is"])
    def test_ranking_preserved(self, method, rng):
        row = rng.uniform(-1, 1, 7)
        p = probe_from_matrix(np.tile(row, (12, 1)), beta=20.0, K_csls=3)
        for _ in range(25):
            s = rng.uniform(-1, 1, 12)
            eta = get_normaliser(method)(s, p)
            assert argsort_desc(eta).order.tolist() == argsort_desc(s).order.tolist()


@pytest.mark.unit
class TestLogSpace:
    """Direct and log-space inverted softmax agree."""

    def test_paths_agree(self, rng):
        probe = rng.uniform(-1, 1, (10, 6))
        p = probe_from_matrix(probe, beta=30.0)
        s = rng.uniform(-1, 1, 10)
        direct = np.exp(30.0 * s) / p.is_denominators
        logged = np.exp(30.0 * s - p.is_log_denominators)
        np.testing.assert_allclose(direct, logged, rtol=1e-9, atol=0)
        np.testing.assert_allclose(normalise_is(s, p), direct, rtol=1e-12)

    def test_large_beta_stays_finite(self, rng):
        probe = rng.uniform(0.5, 1.0, (8, 5))
        p = probe_from_matrix(probe, beta=2000.0)
        assert p.log_space
        # Each similarity is one of its own probe entries, so eta <= 1
        eta = normalise_is(probe[:, 0], p)
        assert np.isfinite(eta).all()

    def test_similarity_above_every_bank_similarity_stays_finite(self):
        # beta * s - log D reaches 1350, past what exp can represent
        p = probe_from_matrix(np.array([[0.0], [1.0]]), beta=1500.0, active=[0])
        s = np.array([0.9, 0.1])

        eta = normalise_is(s, p)
        assert np.isfinite(eta).all()
        assert argsort_desc(eta).order.tolist() == [0, 1]
        np.testing.assert_allclose(eta, 1500.0 * s - p.is_log_denominators)

        eta_dis = normalise_dis(s, p)
        assert np.isfinite(eta_dis).all()
        assert argsort_desc(eta_dis).order.tolist() == [0, 1]

    def test_overflowing_row_does_not_change_other_rows(self):
        p = probe_from_matrix(np.array([[0.0], [1.0]]), beta=1500.0)
        block = np.array([[0.9, 0.1], [0.1, 0.2]])
        eta = normalise_is(block, p)
        assert np.isfinite(eta).all()
        np.testing.assert_allclose(eta[0], 1500.0 * block[0] - p.is_log_denominators)
        np.testing.assert_allclose(eta[1], normalise_is(block[1], p))
