"""stretchlab: discrete experiments on isoperimetry by metric stretching."""

__version__ = "0.1.0"
