"""Crop price forecasting and planting-portfolio planning."""

__version__ = "0.1.0"
