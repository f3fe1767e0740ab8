"""Exact tau-functions of the KP and Toda hierarchies built from Schur
polynomials and content products, with brute-force symmetric-group oracles
and map/triangulation enumeration."""

from tauforge.partitions import Partition, parse_partition, partitions, partitions_upto
from tauforge.series import Series, Truncation, rational

__version__ = "0.1.0"

__all__ = [
    "Partition",
    "Series",
    "Truncation",
    "parse_partition",
    "partitions",
    "partitions_upto",
    "rational",
]
