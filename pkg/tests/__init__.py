"""Tests for hetgt."""
