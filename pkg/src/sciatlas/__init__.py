"""sciatlas: hierarchical base maps of science with overlay projections."""

__version__ = "0.1.0"
