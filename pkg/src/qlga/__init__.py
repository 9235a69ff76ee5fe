"""One-dimensional quantum lattice gas: simulator, random-walk comparator and circuit compiler."""

__version__ = "0.1.0"
