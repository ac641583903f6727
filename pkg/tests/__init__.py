"""Tests for tcp-homotopy."""
