"""hetgt: heterogeneous graph tree networks for semi-supervised node classification."""

__version__ = "1.0.0"
