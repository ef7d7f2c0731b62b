"""Unit tests for hetgt.core."""
