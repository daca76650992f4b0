"""Shared public surface; populated as modules land."""
