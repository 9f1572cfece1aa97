"""Forced oscillations of a body on a light rod of distributed-order viscoelastic material."""

from .models import MaterialModel, OrderDistribution, distributed, zener

__version__ = "0.1.0"

__all__ = ["MaterialModel", "OrderDistribution", "distributed", "zener", "__version__"]
