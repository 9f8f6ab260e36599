"""Weight-2 newforms of prime level via supersingular isogeny graphs."""

__version__ = "0.1.0"
