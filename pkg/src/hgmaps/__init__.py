"""hg-maps: Hodge–Gaussian maps on the projective line and on complex tori."""

__version__ = "0.1.0"

__all__ = ["__version__"]
