"""Exact flag-map, valuation, and symbol checks over small finite fields."""

__version__ = "0.1.0"
