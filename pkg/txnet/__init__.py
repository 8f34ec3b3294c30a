"""
txnet: transaction-graph construction, sampling and complex-network metrics.
"""

__version__ = "1.0.0"

__all__ = ["__version__"]
