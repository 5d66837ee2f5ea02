"""Two-stage human verification: hand-image challenges plus finger biometrics."""

__version__ = "0.1.0"
