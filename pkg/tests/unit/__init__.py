"""Unit tests for hetgt modules."""
