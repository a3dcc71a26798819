"""Matrix Weyl functions, boundary relations and scattering matrices for open quantum systems."""

from . import errors, herglotz, matkit, relspace, scatter, sturm

__version__ = "0.1.0"

__all__ = ["errors", "herglotz", "matkit", "relspace", "scatter", "sturm", "__version__"]
