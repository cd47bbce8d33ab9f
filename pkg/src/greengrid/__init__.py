"""Green Grid: e-waste recycling platform backend."""

__version__ = "0.1.0"
