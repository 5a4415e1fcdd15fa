"""Reference groups used throughout the tests, demos and golden files."""
from .schottky import Disk, ProductGroup, build_factor

__all__ = ["four_disk_factor", "four_disk_product", "FOUR_DISK_CONFIG"]

FOUR_DISK_CONFIG = {
    "factors": [
        {
            "disks": [
                {"index": 1, "center": -6.0, "radius": 1.0},
                {"index": -1, "center": -2.0, "radius": 1.0},
                {"index": 2, "center": 2.0, "radius": 1.0},
                {"index": -2, "center": 6.0, "radius": 1.0},
            ]
        }
    ]
}


def four_disk_factor(scale=1.0):
    """Unit disks at -6, -2, 2, 6 paired (1, -1) and (2, -2).

    ``scale`` multiplies every radius (centres fixed), which keeps the disks
    disjoint for ``scale < 2``.
    """
    return build_factor([
        Disk(-6.0, scale, 1),
        Disk(-2.0, scale, -1),
        Disk(2.0, scale, 2),
        Disk(6.0, scale, -2),
    ])


def four_disk_product(rank=2):
    f = four_disk_factor()
    return ProductGroup((f,) * rank)
