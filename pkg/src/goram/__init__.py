"""Secret-shared graph store with ORAM-indexed 2d partitions."""
__version__ = "0.1.0"
