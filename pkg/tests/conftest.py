"""Shared pytest configuration (also makes `import oracles` work from here)."""
