"""Configuration module for enumeration guards and environment variables."""

import os

from dotenv import load_dotenv

# Load .env file if it exists
load_dotenv()

# Base guards, multiplied by DSKP_SIZE_GUARD
BASE_MATCHING_VERTICES = 60
BASE_FOREST_EDGES = 40
BASE_PERMUTATION_SIZE = 7
BASE_SYMBOLIC_K = 3


class Config:
    """Application configuration."""

    def __init__(self):
        self.log_level: str = os.getenv("LOG_LEVEL", "INFO")
        raw_guard = os.getenv("DSKP_SIZE_GUARD", "1")
        raw_seed = os.getenv("DSKP_SEED", "1")

        try:
            self.size_guard: int = int(raw_guard)
        except ValueError:
            raise ValueError(
                f"DSKP_SIZE_GUARD must be a positive integer, got {raw_guard!r}. "
                "Unset it or set it to 1 to use the default guards."
            )
        if self.size_guard < 1:
            raise ValueError(
                f"DSKP_SIZE_GUARD must be a positive integer, got {self.size_guard}. "
                "Unset it or set it to 1 to use the default guards."
            )

        try:
            self.default_seed: int = int(raw_seed)
        except ValueError:
            raise ValueError(f"DSKP_SEED must be an integer, got {raw_seed!r}.")

    @property
    def max_matching_vertices(self) -> int:
        """Largest vertex count accepted by exhaustive matching enumeration."""
        return BASE_MATCHING_VERTICES * self.size_guard

    @property
    def max_forest_edges(self) -> int:
        """Largest edge count of G• accepted by tree/forest enumeration."""
        return BASE_FOREST_EDGES * self.size_guard

    @property
    def max_permutation_size(self) -> int:
        """Largest k+1 accepted by permutation-forest sums."""
        return BASE_PERMUTATION_SIZE * self.size_guard

    @property
    def max_symbolic_k(self) -> int:
        """Largest Aztec size accepted by the symbolic pipelines."""
        return BASE_SYMBOLIC_K if self.size_guard == 1 else BASE_SYMBOLIC_K + self.size_guard


# Global config instance
config = Config()
