"""Schottky groups, products of their quotient surfaces, the Weyl chamber flow
on the product, its boundary-map coding and the multi-parameter transfer
operators built from it."""
from .moebius import MoebiusTransform, boundary_apply, classify_and_axis, compose, inverse
from .schottky import Disk, ProductGroup, SchottkyFactor, Word, build_factor, validate_factor
from .fixtures import four_disk_factor, four_disk_product

__version__ = "0.1.0"

__all__ = [
    "MoebiusTransform",
    "boundary_apply",
    "classify_and_axis",
    "compose",
    "inverse",
    "Disk",
    "ProductGroup",
    "SchottkyFactor",
    "Word",
    "build_factor",
    "validate_factor",
    "four_disk_factor",
    "four_disk_product",
]
