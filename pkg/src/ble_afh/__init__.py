"""Simulated BLE link layer with adaptive frequency hopping strategies."""

__version__ = "0.1.0"
