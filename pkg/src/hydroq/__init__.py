"""Classical and simulated-quantum machine learning for flood prediction."""
__version__ = "0.1.0"
