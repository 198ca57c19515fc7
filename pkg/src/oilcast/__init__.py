"""News-aware crude oil price forecasting toolkit."""

__version__ = "0.1.0"
