"""Pytest configuration anchor; keeps the tests directory importable."""
