"""elaforge: evolve interpretable benchmark functions toward target landscape features."""

__version__ = "0.1.0"
