"""Unit tests for the similarity kernel.

Covers cosine similarity, similarity vectors, top-k selection and the
stable descending ranking.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.models.errors import ArgumentError, ShapeError, ValidationError, ZeroVectorError
from src.similarity.kernel import (
    argsort_desc,
    argsort_desc_rows,
    cosine,
    sim_vector,
    top_k,
    top_k_mean,
)
from tests.conftest import make_matrix

finite_vectors = arrays(
    np.float64,
    st.integers(min_value=1, max_value=40),
    elements=st.floats(-1.0, 1.0, allow_nan=False, width=32),
)


@pytest.mark.unit
class TestCosine:
    """Test cosine similarity."""

    def test_orthogonal(self):
        assert cosine([1, 0], [0, 1]) == 0.0

    def test_parallel(self):
        assert cosine([1, 1], [2, 2]) == pytest.approx(1.0)

    def test_forty_five_degrees(self):
        assert cosine([1, 0], [1, 1]) == pytest.approx(0.70710678, abs=1e-8)

    def test_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            cosine([0, 0], [1, 0])

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            cosine([1, 0], [1, 0, 0])

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.floats(0.01, 100),
        st.floats(0.01, 100),
    )
    def test_scale_invariant(self, u, alpha, beta):
        """Positive rescaling of either argument leaves cosine unchanged."""
        v = [0.3, -0.2, 0.9]
        if np.linalg.norm(u) < 1e-3:
            return
        assert cosine(np.multiply(alpha, u), np.multiply(beta, v)) == pytest.approx(
            cosine(u, v), abs=1e-9
        )


@pytest.mark.unit
class TestSimVector:
    """Test similarity of one query against a gallery."""

    def test_identity_gallery(self):
        gallery = make_matrix([[1, 0], [0, 1]])
        np.testing.assert_allclose(sim_vector([1, 0], gallery), [1.0, 0.0])

    def test_symmetric_query(self):
        gallery = make_matrix([[1, 0], [0, 1]])
        np.testing.assert_allclose(sim_vector([1, 1], gallery), [0.7071, 0.7071], atol=1e-4)

    def test_dimension_mismatch(self):
        gallery = make_matrix([[1, 0], [0, 1]])
        with pytest.raises(ShapeError):
            sim_vector([1, 0, 0], gallery)

    def test_zero_gallery_row_names_id(self):
        gallery = make_matrix([[1, 0], [0, 0]], ids=["ok", "empty"])
        with pytest.raises(ZeroVectorError, match="empty"):
            sim_vector([1, 0], gallery)


@pytest.mark.unit
class TestTopK:
    """Test top-k selection."""

    def test_single_max(self):
        assert top_k([0.1, 0.9, 0.5], 1).tolist() == [1]

    def test_ties_by_ascending_index(self):
        assert top_k([0.5, 0.5, 0.1], 2).tolist() == [0, 1]

    def test_tie_straddling_the_cut(self):
        assert top_k([0.2, 0.7, 0.7, 0.7], 2).tolist() == [1, 2]

    def test_k_larger_than_length(self):
        with pytest.raises(ArgumentError):
            top_k([0.3], 2)

    def test_k_zero(self):
        with pytest.raises(ArgumentError):
            top_k([0.3], 0)

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            top_k([0.3, math.nan], 1)

    @settings(max_examples=200, deadline=None)
    @given(finite_vectors, st.data())
    def test_matches_full_sort(self, values, data):
        """top_k equals the head of the stable descending argsort."""
        k = data.draw(st.integers(min_value=1, max_value=values.size))
        assert top_k(values, k).tolist() == argsort_desc(values).order[:k].tolist()

    def test_top_k_mean_vector(self):
        assert top_k_mean([0.1, 0.9, 0.5], 2) == pytest.approx(0.7)

    def test_top_k_mean_rows(self):
        means = top_k_mean(np.array([[0.1, 0.9, 0.5], [1.0, 0.0, 0.0]]), 1)
        np.testing.assert_allclose(means, [0.9, 1.0])


@pytest.mark.unit
class TestArgsortDesc:
    """Test the stable descending ranking."""

    def test_basic_order(self):
        assert argsort_desc([0.2, 0.9, 0.5]).order.tolist() == [1, 2, 0]

    def test_ties_keep_index_order(self):
        assert argsort_desc([1.0, 1.0]).order.tolist() == [0, 1]

    def test_empty(self):
        ranking = argsort_desc([])
        assert ranking.order.tolist() == []
        assert ranking.gallery_size == 0

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            argsort_desc([0.1, math.nan])

    def test_positions_are_one_indexed(self):
        ranking = argsort_desc([0.2, 0.9, 0.5])
        assert ranking.positions().tolist() == [3, 1, 2]

    @settings(max_examples=100, deadline=None)
    @given(finite_vectors)
    def test_invariant_under_increasing_transform(self, values):
        """A strictly increasing map (exp) preserves the ranking."""
        assert (
            argsort_desc(np.exp(values)).order.tolist() == argsort_desc(values).order.tolist()
        )

    def test_rows_match_single(self, rng):
        scores = rng.integers(0, 4, size=(5, 12)).astype(np.float64)
        rows = argsort_desc_rows(scores)
        for row, s in zip(rows, scores):
            assert row.tolist() == argsort_desc(s).order.tolist()
