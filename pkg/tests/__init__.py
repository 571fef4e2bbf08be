"""Tests for dskplab."""
