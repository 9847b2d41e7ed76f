"""Test suite for qbnorm-retrieval.

This package contains unit tests, integration tests, and benchmarks
for the normalisers, storage formats, evaluation and CLI.
"""
