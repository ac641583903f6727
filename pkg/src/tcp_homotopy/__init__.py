"""Homotopy continuation solver for tensor complementarity problems."""
