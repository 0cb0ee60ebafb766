"""Reference solutions, manufactured loads and the built-in validation suite."""
