"""Integration test init file."""
