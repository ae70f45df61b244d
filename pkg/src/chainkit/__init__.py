"""Exact homological algebra over Z and Z/m: modules, chain complexes,
resolutions by disks, small-subcomplex extraction and tensor products."""

__version__ = "0.1.0"
