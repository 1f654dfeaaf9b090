"""Mapping degrees between S3xS5, M01 and SU(3) by symbolic homotopy calculus."""

from .catalog import load_catalog
from .degsets import DegreeSet, canonicalize, image_set
from .obstruction import compute_all, compute_pair

__all__ = ["DegreeSet", "canonicalize", "compute_all", "compute_pair", "image_set", "load_catalog"]
__version__ = "0.1.0"
