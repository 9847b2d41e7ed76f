"""Unit tests for the synthetic benchmark generator and experiments.

Tests determinism, the noise model, querybank supplements and the
before/after experiment and sweep drivers.
"""

import numpy as np
import pytest

from src.datagen.experiment import (
    evaluate_rankings_for,
    hubness_k,
    prepare_dataset,
    run_experiment,
    run_on_dataset,
    sweep,
)
from src.datagen.generator import (
    SynthDataset,
    anisotropic_unit_rows,
    axis_scales,
    generate,
    make_ids,
    noisy_copies,
    select_low_coverage,
    supplement_querybank,
    top1_indices,
    trailing_subspace_rows,
)
from src.models.config import QUERYBANK_DOMAINS, NormaliserConfig, SynthSpec
from src.models.errors import ArgumentError
from src.models.ranking import GroundTruth
from tests.conftest import make_matrix


@pytest.mark.unit
class TestGenerate:
    """Test synthetic data generation."""

    def test_same_seed_bit_identical(self, small_synth_spec):
        first = generate(small_synth_spec)
        second = generate(small_synth_spec)
        for a, b in zip(list(first)[:3], list(second)[:3]):
            assert a.ids == b.ids
            assert a.data.tobytes() == b.data.tobytes()
        assert first.gt == second.gt

    def test_different_seed_differs(self, small_synth_spec):
        a = generate(small_synth_spec)
        b = generate(small_synth_spec.replace(seed=small_synth_spec.seed + 1))
        assert a.gallery.data.tobytes() != b.gallery.data.tobytes()

    def test_shapes_and_ids(self, small_synth_spec):
        queries, gallery, querybank, gt = generate(small_synth_spec)
        assert (queries.n, gallery.n, querybank.n) == (60, 40, 50)
        assert queries.d == gallery.d == querybank.d == 16
        assert queries.ids[0] == "q00000"
        assert gallery.ids[-1] == "g00039"
        assert querybank.ids[0] == "b00000"
        assert len(gt) == 60

    def test_ground_truth_wraps(self, small_synth_spec):
        gt = generate(small_synth_spec).gt
        assert gt.relevant[0] == frozenset({0})
        assert gt.relevant[45] == frozenset({5})

    def test_rows_are_unit_norm(self, small_synth_spec):
        for m in list(generate(small_synth_spec))[:3]:
            norms = np.linalg.norm(m.data.astype(np.float64), axis=1)
            np.testing.assert_allclose(norms, 1.0, atol=1e-6)

    def test_make_ids_width(self):
        assert make_ids("q", 3) == ("q00000", "q00001", "q00002")
        assert make_ids("g", 123457)[-1] == "g123456"


@pytest.mark.unit
class TestNoisyCopies:
    """Test the query noise model."""

    def test_full_correlation_keeps_anchor(self, rng):
        anchors = np.eye(3)
        np.testing.assert_allclose(noisy_copies(rng, anchors, 1.0), anchors)

    def test_zero_correlation_ignores_anchor(self, rng):
        anchors = np.tile([1.0, 0.0, 0.0, 0.0], (500, 1))
        copies = noisy_copies(rng, anchors, 0.0)
        # Pure noise directions: mean cosine with the anchor is near 0
        assert abs(copies[:, 0].mean()) < 0.1

    def test_correlation_orders_similarity(self, rng):
        anchors = np.tile(np.eye(16)[0], (300, 1))
        low = noisy_copies(np.random.default_rng(1), anchors, 0.3)[:, 0].mean()
        high = noisy_copies(np.random.default_rng(1), anchors, 0.8)[:, 0].mean()
        assert high > low


@pytest.mark.unit
class TestSupplement:
    """Test random querybank supplements."""

    def test_appends_random_rows(self, small_synth_spec):
        bank = generate(small_synth_spec).querybank
        out = supplement_querybank(bank, 5, seed=9)
        assert out.n == bank.n + 5
        assert out.ids[-1] == "r00004"
        assert out.data[: bank.n].tobytes() == bank.data.tobytes()

    def test_zero_is_identity(self, small_synth_spec):
        bank = generate(small_synth_spec).querybank
        assert supplement_querybank(bank, 0, seed=9) is bank

    def test_negative(self, small_synth_spec):
        with pytest.raises(ArgumentError):
            supplement_querybank(generate(small_synth_spec).querybank, -1, seed=9)

    def test_prepare_dataset_uses_supplement(self, small_synth_spec):
        dataset = prepare_dataset(small_synth_spec, extra_random=7)
        assert dataset.querybank.n == small_synth_spec.n_querybank + 7


@pytest.mark.unit
class TestExperiment:
    """Test before/after experiments."""

    def test_perfect_retrieval_survives_dis(self):
        # Far-domain bank: probe denominators vary far less than exp(beta * margin)
        spec = SynthSpec(n_queries=20, n_gallery=20, n_querybank=20, dim=256, seed=2,
                         correlation=1.0, querybank_domain="far")
        result = run_experiment(spec, NormaliserConfig(method="dis", beta=20.0))
        assert result.before.metrics.r_at[1] == 100.0
        assert result.after.metrics.r_at[1] == 100.0

    def test_independent_queries_retrieve_poorly(self):
        spec = SynthSpec(n_queries=200, n_gallery=40, n_querybank=50, dim=32, seed=4,
                         correlation=0.0)
        result = run_experiment(spec, NormaliserConfig(method="none"))
        assert result.before.metrics.r_at[1] < 20.0

    def test_counts_sum_to_queries(self, small_synth_spec, dis_config):
        result = run_experiment(small_synth_spec, dis_config)
        assert sum(result.before.counts) == small_synth_spec.n_queries
        assert sum(result.after.counts) == small_synth_spec.n_queries
        assert result.before.counts == sorted(result.before.counts, reverse=True)

    def test_none_reuses_baseline(self, small_synth_spec):
        result = run_experiment(small_synth_spec, NormaliserConfig(method="none"))
        assert result.after is result.before
        assert not result.skewness_reduced

    def test_report_layout(self, small_synth_spec, dis_config):
        out = run_experiment(small_synth_spec, dis_config, extra_random=3).to_dict()
        assert set(out) == {"spec", "config", "seed", "extra_random", "before", "after"}
        assert out["extra_random"] == 3
        assert {"R@1", "R@5", "R@10", "MdR", "GM", "skewness", "max_count"} <= set(out["after"])

    def test_hubness_k_clamped(self):
        assert hubness_k(5, 10) == 5
        assert hubness_k(500, 10) == 10

    def test_evaluate_rankings_for_small_gallery(self):
        spec = SynthSpec(n_queries=10, n_gallery=4, n_querybank=6, dim=8, seed=0)
        outcome = evaluate_rankings_for(generate(spec), NormaliserConfig(method="is"))
        assert outcome.hubness.k == 4
        assert outcome.hubness.n_k.sum() == 4 * 10

    def test_empty_activation_overlap_leaves_outcome_unchanged(self):
        # Every querybank item points at g3; no query has g3 as its top-1
        dataset = SynthDataset(
            queries=make_matrix(
                [[1.0, 0.2, 0.1, 0.0], [0.1, 1.0, 0.2, 0.0], [0.2, 0.1, 1.0, 0.0]], "q"
            ),
            gallery=make_matrix(np.eye(4), "g"),
            querybank=make_matrix([[0.0, 0.1, 0.0, 1.0], [0.1, 0.0, 0.0, 1.0]], "b"),
            gt=GroundTruth.single([0, 1, 2], 4),
        )
        spec = SynthSpec(n_queries=3, n_gallery=4, n_querybank=2, dim=4)
        cfg = NormaliserConfig(method="dis", beta=20.0, k_activation=1)
        result = run_on_dataset(dataset, spec, cfg, k=1)
        assert result.after is not result.before
        assert result.after.to_dict() == result.before.to_dict()
        assert result.after.counts == result.before.counts == [1, 1, 1, 0]
        assert result.before.metrics.r_at[1] == 100.0

    @pytest.mark.parametrize("domain", QUERYBANK_DOMAINS)
    def test_every_querybank_domain_runs(self, small_synth_spec, dis_config, domain):
        spec = small_synth_spec.replace(querybank_domain=domain)
        result = run_experiment(spec, dis_config)
        assert result.to_dict()["spec"]["querybank_domain"] == domain
        assert sum(result.after.counts) == spec.n_queries


@pytest.mark.unit
class TestSweep:
    """Test parameter sweeps."""

    def test_querybank_size_rows(self, small_synth_spec, dis_config):
        out = sweep("querybank-size", small_synth_spec, dis_config, ["10", "50"])
        assert out["param"] == "querybank_size"
        assert [row["querybank_size"] for row in out["rows"]] == [10, 50]
        assert "R@1" in out["baseline"]

    def test_beta_rows(self, small_synth_spec, dis_config):
        out = sweep("beta", small_synth_spec, dis_config, ["1", "20"])
        assert [row["beta"] for row in out["rows"]] == [1.0, 20.0]

    def test_bad_value(self, small_synth_spec, dis_config):
        with pytest.raises(ArgumentError):
            sweep("beta", small_synth_spec, dis_config, ["hot"])

    def test_non_positive_beta(self, small_synth_spec, dis_config):
        with pytest.raises(ArgumentError):
            sweep("beta", small_synth_spec, dis_config, ["0"])

    def test_unknown_param(self, small_synth_spec, dis_config):
        with pytest.raises(ArgumentError):
            sweep("dim", small_synth_spec, dis_config, ["4"])

    def test_k_activation_rows(self, small_synth_spec, dis_config):
        out = sweep("k-activation", small_synth_spec, dis_config, ["1", "3"])
        assert out["param"] == "k_activation"
        assert [row["k_activation"] for row in out["rows"]] == [1, 3]
        assert out["config"]["method"] == "dis"

    def test_fractional_k_activation(self, small_synth_spec, dis_config):
        with pytest.raises(ArgumentError):
            sweep("k-activation", small_synth_spec, dis_config, ["1.5"])

    def test_zero_k_activation(self, small_synth_spec, dis_config):
        with pytest.raises(ArgumentError):
            sweep("k-activation", small_synth_spec, dis_config, ["0"])


@pytest.mark.unit
class TestGalleryDistribution:
    """Test the anisotropic gallery and the querybank sources."""

    def test_axis_scales(self):
        np.testing.assert_allclose(axis_scales(4), [1.0, 1 / np.sqrt(2), 1 / np.sqrt(3), 0.5])

    def test_leading_axes_carry_most_mass(self, rng):
        rows = anisotropic_unit_rows(rng, 2000, 64)
        energy = (rows**2).mean(axis=0)
        assert energy[0] > 5 * energy[-1]
        assert energy[:8].sum() > 0.4

    def test_noise_norm(self, rng):
        anchors = np.zeros((2000, 128))
        anchors[:, 0] = 1.0
        mixed = noisy_copies(rng, anchors, 0.5)
        # 0.5 * e0 + 0.5 * noise with |noise| ~ 3: cosine with e0 ~ 1/sqrt(10)
        assert 0.25 < mixed[:, 0].mean() < 0.4

    def test_trailing_subspace_rows(self, rng):
        rows = trailing_subspace_rows(rng, 10, 8)
        assert np.all(rows[:, :4] == 0.0)
        np.testing.assert_allclose(np.linalg.norm(rows, axis=1), 1.0)

    def test_far_bank_is_less_similar_to_gallery(self):
        spec = SynthSpec(n_queries=10, n_gallery=300, n_querybank=300, dim=64, seed=5,
                         correlation=1.0)
        near = generate(spec)
        far = generate(spec.replace(querybank_domain="far"))
        assert near.gallery.data.tobytes() == far.gallery.data.tobytes()

        def mean_abs(bank):
            g = near.gallery.data.astype(np.float64)
            return np.abs(bank.data.astype(np.float64) @ g.T).mean()

        assert mean_abs(far.querybank) < 0.5 * mean_abs(near.querybank)

    @pytest.mark.parametrize("domain", QUERYBANK_DOMAINS)
    def test_querybank_size_per_domain(self, small_synth_spec, domain):
        bank = generate(small_synth_spec.replace(querybank_domain=domain)).querybank
        assert bank.n == small_synth_spec.n_querybank
        assert bank.ids[-1] == "b00049"

    def test_domain_is_case_insensitive(self, small_synth_spec):
        assert small_synth_spec.replace(querybank_domain="FAR").querybank_domain == "far"


@pytest.mark.unit
class TestLowCoverage:
    """Test the adversarial querybank selection."""

    def test_whole_groups_largest_first(self):
        gallery = np.eye(3)
        # top-1 items: 0, 1, 1, 2, 1, 0
        candidates = np.array(
            [[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float
        )
        assert select_low_coverage(candidates, gallery, 3).tolist() == [1, 2, 4]
        # Group 0 (two rows) is taken before group 2 (one row)
        assert select_low_coverage(candidates, gallery, 5).tolist() == [0, 1, 2, 4, 5]

    def test_coverage_not_above_first_n(self, rng):
        gallery = anisotropic_unit_rows(rng, 50, 16)
        candidates = noisy_copies(rng, anisotropic_unit_rows(rng, 200, 16), 0.7)
        chosen = select_low_coverage(candidates, gallery, 50)
        assert chosen.tolist() == sorted(chosen.tolist())
        assert len(chosen) == 50
        covered = np.unique(top1_indices(candidates[chosen], gallery)).size
        baseline = np.unique(top1_indices(candidates[:50], gallery)).size
        assert covered <= baseline

    @pytest.mark.parametrize("n", [0, 7])
    def test_out_of_range(self, n):
        with pytest.raises(ArgumentError):
            select_low_coverage(np.eye(6), np.eye(6), n)

    def test_adversarial_bank_covers_fewer_items(self, small_synth_spec):
        near = generate(small_synth_spec)
        adversarial = generate(small_synth_spec.replace(querybank_domain="adversarial"))
        g = near.gallery.data.astype(np.float64)

        def coverage(bank):
            return np.unique(top1_indices(bank.data.astype(np.float64), g)).size

        assert coverage(adversarial.querybank) <= coverage(near.querybank)
