"""Isotropic second-gradient linear elasticity: tensors, constitutive law,
positivity and torsion."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.1.0"

from .constitutive import MaterialError, MaterialParams, apply_hooke, energy, gammas
from .stability import report

__all__ = ["MaterialError", "MaterialParams", "__version__", "apply_hooke", "energy", "gammas", "report"]
