"""dskp-lab - Exact combinatorial solutions of the dSKP recurrence and its siblings."""

__version__ = "0.1.0"
