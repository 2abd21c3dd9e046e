"""phylograph: server-side storage and analysis of phylogenetic typing data."""

__version__ = "0.1.0"
