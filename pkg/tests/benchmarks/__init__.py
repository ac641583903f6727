"""Benchmark tests for tcp-homotopy."""
