"""Palmprint registration and coarse left/right classification."""
