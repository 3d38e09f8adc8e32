"""sphere-grf - Whittle-Matern random fields on the sphere via surface finite elements."""

__version__ = "0.1.0"
