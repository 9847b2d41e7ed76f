"""Integration tests for the qbnorm command-line workflows."""
