"""Unit tests for qbnorm-retrieval components."""
