"""Tests for environment-driven configuration."""

import pytest

from dskplab.config import Config


class TestConfig:
    """Tests for Config guards and seeds."""

    def test_defaults(self, monkeypatch):
        """Test the guards with DSKP_SIZE_GUARD unset."""
        monkeypatch.delenv("DSKP_SIZE_GUARD", raising=False)
        monkeypatch.delenv("DSKP_SEED", raising=False)
        config = Config()
        assert config.size_guard == 1
        assert config.default_seed == 1
        assert config.max_matching_vertices == 60
        assert config.max_symbolic_k == 3

    def test_scaled_guards(self, monkeypatch):
        """Test that DSKP_SIZE_GUARD multiplies the enumeration guards."""
        monkeypatch.setenv("DSKP_SIZE_GUARD", "2")
        config = Config()
        assert config.max_matching_vertices == 120
        assert config.max_forest_edges == 80
        assert config.max_permutation_size == 14
        assert config.max_symbolic_k == 5

    @pytest.mark.parametrize("raw", ["abc", "0", "-3"])
    def test_invalid_guard(self, monkeypatch, raw):
        """Test that a non-positive or malformed guard is rejected."""
        monkeypatch.setenv("DSKP_SIZE_GUARD", raw)
        with pytest.raises(ValueError, match="must be a positive integer"):
            Config()

    def test_invalid_seed(self, monkeypatch):
        """Test that DSKP_SEED must be an integer."""
        monkeypatch.setenv("DSKP_SEED", "seven")
        with pytest.raises(ValueError, match="DSKP_SEED must be an integer"):
            Config()
