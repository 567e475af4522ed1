"""Divergence-based differential privacy metrics for Laplace mechanisms."""
