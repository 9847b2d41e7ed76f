"""Benchmark tests for normaliser latency and storage throughput."""
