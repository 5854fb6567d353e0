"""Unit test init file."""
